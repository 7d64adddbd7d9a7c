// The model file format: parsing, canonical serialization, and the
// round-trip guarantee between them.

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "helpers.hpp"
#include "valnet/valnet.hpp"

using namespace valnet;
using testutil::load_model;
using testutil::model_path;
using testutil::read_file;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

// REQUIRE that parsing `text` fails at `line` with a message containing
// `fragment`.
void require_parse_error(const std::string& text, int line, const std::string& fragment) {
    try {
        parse_model(text);
        FAIL("expected a parse failure containing \"" << fragment << "\"");
    } catch (const ParseError& e) {
        INFO(e.what());
        REQUIRE(e.line() == line);
        REQUIRE_THAT(e.what(), ContainsSubstring(fragment));
        REQUIRE_THAT(e.what(), ContainsSubstring("line " + std::to_string(line)));
    }
}

constexpr const char* kVnHeader = "kind probability\nmodel vn\n";

}  // namespace

TEST_CASE("parsing the shipped models", "[model_io]") {
    SECTION("a plain network with tables") {
        const auto m = load_model("example1.vn");
        REQUIRE(m.type == ModelType::vn);
        REQUIRE(m.kind() == Algebra::probability);
        REQUIRE(m.network.nodes().size() == 4);
        const auto* alpha = m.network.find_node("alpha");
        REQUIRE(alpha != nullptr);
        REQUIRE_FALSE(alpha->is_conditional());
        REQUIRE(alpha->table.has_value());
        REQUIRE(alpha->table->values() == std::vector<double>{0.3, 0.7, 0.6, 0.4});
    }
    SECTION("a conditional network keeps head and tail apart") {
        const auto m = load_model("example2.vn");
        const auto* delta = m.network.find_node("delta");
        REQUIRE(delta != nullptr);
        REQUIRE(delta->head.names() == VarSet{"Y"});
        REQUIRE(delta->tail().names() == VarSet{"W", "X"});
        // Domain order is head first, then the tail as written.
        REQUIRE(delta->domain.names() == VarSet{"W", "X", "Y"});
        REQUIRE(delta->domain.variables()[0].name == "Y");
    }
    SECTION("a structure-only network has no tables") {
        const auto m = load_model("fig6.vn");
        for (const auto& n : m.network.nodes()) REQUIRE_FALSE(n.table.has_value());
    }
    SECTION("every shipped file parses and reaches a serialization fixed point") {
        for (const std::string name :
             {"example1.vn", "example2.vn", "fig6.vn", "fig8.ug", "fig9.dag", "fig9.vn",
              "fig10.dbg", "fig11.rcg"}) {
            INFO(name);
            const auto m = parse_model(read_file(model_path(name)));
            const std::string text = serialize_model(m);
            const auto again = parse_model(text);
            REQUIRE(models_equal(m, again));
            REQUIRE(serialize_model(again) == text);
        }
    }
}

TEST_CASE("tokenizing", "[model_io]") {
    SECTION("comments and blank lines are ignored") {
        const auto m = parse_model(
            "# leading comment\n"
            "kind probability   # trailing comment\n"
            "\n"
            "   \n"
            "model vn\n"
            "var A 2\n"
            "val n A # the only node\n");
        REQUIRE(m.network.nodes().size() == 1);
        REQUIRE(m.network.nodes()[0].domain.names() == VarSet{"A"});
    }
    SECTION("directive order is free apart from 'model' gating") {
        const auto m = parse_model(
            "model vn\n"
            "var A 2\n"
            "val n A\n"
            "kind kappa\n"
            "table n 0 inf\n");
        REQUIRE(m.kind() == Algebra::kappa);
        REQUIRE(m.network.nodes()[0].table->values() ==
                std::vector<double>{0.0, kInf});
    }
}

TEST_CASE("serialization is canonical", "[model_io]") {
    SECTION("a network model") {
        const std::string text = serialize_model(load_model("example2.vn"));
        REQUIRE_THAT(text, ContainsSubstring("kind probability\nmodel vn\n"));
        REQUIRE_THAT(text, ContainsSubstring("var V 2\nvar W 2\n"));
        REQUIRE_THAT(text, ContainsSubstring("cond delta head Y tail W X\n"));
        REQUIRE_THAT(text, ContainsSubstring("table alpha 0.6 0.4\n"));
    }
    SECTION("a plain node lists its whole domain") {
        const std::string text = serialize_model(load_model("example1.vn"));
        REQUIRE_THAT(text, ContainsSubstring("val alpha W X\n"));
        REQUIRE_THAT(text, ContainsSubstring("table delta 0.25 0.75 0.5 0.5\n"));
    }
    SECTION("graph models keep their structure lines") {
        REQUIRE_THAT(serialize_model(load_model("fig8.ug")),
                     ContainsSubstring("edge W X\n"));
        REQUIRE_THAT(serialize_model(load_model("fig9.dag")),
                     ContainsSubstring("arc V W\n"));
        const std::string dbg = serialize_model(load_model("fig10.dbg"));
        REQUIRE_THAT(dbg, ContainsSubstring("balloon a1 X1\n"));  // no empty 'parents'
        REQUIRE_THAT(dbg, ContainsSubstring("balloon a4 X5 X6 X7 parents X2\n"));
        const std::string rcg = serialize_model(load_model("fig11.rcg"));
        REQUIRE_THAT(rcg, ContainsSubstring("exo V\nexo W\nexo X\n"));
        REQUIRE_THAT(rcg, ContainsSubstring("edge V W\nedge V X\n"));
        REQUIRE_THAT(rcg, ContainsSubstring("arc W Y\narc X Y\narc X Z\n"));
    }
    SECTION("numbers use the shortest exact form") {
        REQUIRE(detail::format_number(0.1) == "0.1");
        REQUIRE(detail::format_number(2.0) == "2");
        REQUIRE(detail::format_number(0.25) == "0.25");
        REQUIRE(detail::format_number(kInf) == "inf");
    }
}

TEST_CASE("round trips preserve generated models", "[model_io][property]") {
    for (const ModelType type : {ModelType::vn, ModelType::ug, ModelType::dag}) {
        for (const Algebra kind :
             {Algebra::probability, Algebra::kappa, Algebra::possibility}) {
            for (std::uint64_t seed = 1; seed <= 6; ++seed) {
                const auto m = random_model(type, 5, seed, kind);
                const std::string text = serialize_model(m);
                INFO("type " << to_string(type) << " kind " << to_string(kind)
                             << " seed " << seed << "\n"
                             << text);
                const auto back = parse_model(text);
                REQUIRE(models_equal(m, back));
                REQUIRE(serialize_model(back) == text);
            }
        }
    }
}

TEST_CASE("kappa tables round-trip infinities exactly", "[model_io]") {
    const auto m = parse_model(
        "kind kappa\nmodel vn\nvar A 2\nvar B 2\n"
        "val n A B\n"
        "table n 0 inf 2 1\n");
    const std::string text = serialize_model(m);
    REQUIRE_THAT(text, ContainsSubstring("table n 0 inf 2 1\n"));
    REQUIRE(models_equal(m, parse_model(text)));
}

TEST_CASE("parse failures carry the offending line", "[model_io][errors]") {
    SECTION("unknown directive") {
        require_parse_error("kind probability\nmodel vn\nfoo bar\n", 3,
                            "unknown directive 'foo'");
    }
    SECTION("header problems") {
        require_parse_error("kind counts\nmodel vn\n", 1, "unknown algebra 'counts'");
        require_parse_error("kind probability\nmodel mesh\n", 2,
                            "unknown model type 'mesh'");
        require_parse_error("kind probability\nkind kappa\nmodel vn\n", 2,
                            "duplicate 'kind' line");
        require_parse_error("kind probability\nmodel vn\nmodel ug\n", 3,
                            "duplicate 'model' line");
        require_parse_error("model vn\nvar A 2\nval n A\n", 3, "missing 'kind' line");
        require_parse_error("kind probability\nvar A 2\n", 2, "missing 'model' line");
        require_parse_error("", 1, "missing 'kind' line");
    }
    SECTION("variable declarations") {
        require_parse_error(std::string(kVnHeader) + "var A\n", 3,
                            "expected: var <name> <frame-size>");
        require_parse_error(std::string(kVnHeader) + "var A two\n", 3,
                            "bad integer 'two'");
        require_parse_error(std::string(kVnHeader) + "var A 2\nvar A 3\n", 4,
                            "duplicate variable 'A'");
    }
    SECTION("node declarations") {
        require_parse_error(std::string(kVnHeader) + "var A 2\nval n B\n", 4,
                            "unknown variable 'B'");
        require_parse_error(std::string(kVnHeader) + "var A 2\ncond n A\n", 4,
                            "expected: cond <name> head <vars...> [tail <vars...>]");
        require_parse_error(std::string(kVnHeader) + "var A 2\ncond n head tail A\n", 4,
                            "conditional node 'n' has an empty head");
        require_parse_error(std::string(kVnHeader) + "var A 2\ncond n head A tail\n", 4,
                            "'tail' keyword with no variables");
        require_parse_error("val n A\nkind probability\nmodel vn\n", 1,
                            "'val' before 'model' line");
    }
    SECTION("structure lines are gated by the model type") {
        require_parse_error("kind probability\nmodel dag\nvar A 2\nvar B 2\nedge A B\n",
                            5, "'edge' line not allowed in a 'dag' model");
        require_parse_error("kind probability\nmodel ug\nvar A 2\nexo A\n", 4,
                            "'exo' line not allowed in a 'ug' model");
        require_parse_error("kind probability\nmodel ug\nvar A 2\nvar B 2\narc A B\n", 5,
                            "'arc' line not allowed in a 'ug' model");
        require_parse_error(std::string(kVnHeader) + "var A 2\nvar B 2\nedge A B\n", 5,
                            "'edge' line not allowed in a 'vn' model");
    }
    SECTION("tables") {
        const std::string base = std::string(kVnHeader) + "var A 2\nval n A\n";
        require_parse_error(base + "table m 0.5 0.5\n", 5,
                            "table for unknown node 'm'");
        require_parse_error(base + "table n 0.5 0.5\ntable n 0.5 0.5\n", 6,
                            "duplicate table for node 'n'");
        require_parse_error(base + "table n 0.5 0.3 0.2\n", 5,
                            "table for node 'n' has 3 entries, expected 2");
        require_parse_error(base + "table n 0.5 0.x\n", 5, "bad number '0.x'");
    }
}

TEST_CASE("structural violations surface as model errors, not parse errors",
          "[model_io][errors]") {
    SECTION("two nodes claiming the same head variable") {
        REQUIRE_THROWS_AS(
            parse_model(std::string(kVnHeader) +
                        "var A 2\ncond p head A\ncond q head A\n"),
            InvalidModel);
    }
    SECTION("a directed cycle") {
        REQUIRE_THROWS_AS(
            parse_model("kind probability\nmodel dag\nvar A 2\nvar B 2\n"
                        "arc A B\narc B A\n"),
            InvalidModel);
    }
    SECTION("table values that violate the algebra") {
        REQUIRE_THROWS_AS(parse_model(std::string(kVnHeader) +
                                      "var A 2\nval n A\ntable n -0.5 1.5\n"),
                          InvalidValuation);
    }
}
