// The command-line front end, driven in-process through run_command.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "valnet/valnet.hpp"

using namespace valnet;
using testutil::model_path;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::EndsWith;
using Catch::Matchers::StartsWith;

namespace {

struct RunResult {
    int rc = 0;
    std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.rc = run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("query answers structural questions", "[cli]") {
    SECTION("independent triples exit zero") {
        const auto r = run({"query", model_path("fig9.vn"), "--r", "W", "--s", "X",
                            "--v", "V"});
        REQUIRE(r.rc == 0);
        REQUIRE(r.out == "independent (vn-separation)\n");
        REQUIRE(r.err.empty());
    }
    SECTION("non-derivable triples exit one") {
        const auto r = run({"query", model_path("fig9.vn"), "--r", "W", "--s", "X",
                            "--v", "V,Z"});
        REQUIRE(r.rc == 1);
        REQUIRE(r.out == "not-derivable (vn-separation)\n");
    }
    SECTION("--trace narrates the elimination on stderr") {
        const auto r = run({"query", model_path("fig9.vn"), "--r", "W", "--s", "X",
                            "--v", "V", "--trace"});
        REQUIRE(r.rc == 0);
        REQUIRE(r.out == "independent (vn-separation)\n");
        REQUIRE_THAT(r.err, ContainsSubstring("fuse "));
    }
    SECTION("an empty required set is a semantic error") {
        const auto r = run({"query", model_path("fig9.vn"), "--r", "", "--s", "X"});
        REQUIRE(r.rc == 3);
        REQUIRE_THAT(r.err, StartsWith("error: "));
    }
}

TEST_CASE("query supports the graph criteria on dag models", "[cli]") {
    SECTION("d-separation") {
        const auto r = run({"query", model_path("fig9.dag"), "--r", "W", "--s", "X",
                            "--v", "V", "--criterion", "dsep"});
        REQUIRE(r.rc == 0);
        REQUIRE(r.out == "independent (d-separation)\n");
    }
    SECTION("moralization") {
        const auto r = run({"query", model_path("fig9.dag"), "--r", "W", "--s", "X",
                            "--v", "V,Z", "--criterion", "moral"});
        REQUIRE(r.rc == 1);
        REQUIRE(r.out == "not-derivable (moralization)\n");
    }
    SECTION("graph criteria refuse non-dag models") {
        const auto r = run({"query", model_path("fig9.vn"), "--r", "W", "--s", "X",
                            "--criterion", "dsep"});
        REQUIRE(r.rc == 3);
        REQUIRE_THAT(r.err, ContainsSubstring("criterion 'dsep' requires a dag model"));
    }
}

TEST_CASE("query supports the numeric criterion on tabled models", "[cli]") {
    SECTION("independence in the joint") {
        const auto r = run({"query", model_path("example2.vn"), "--r", "W", "--s", "X",
                            "--v", "V", "--criterion", "numeric"});
        REQUIRE(r.rc == 0);
        REQUIRE(r.out == "independent (numeric)\n");
    }
    SECTION("dependence in the joint") {
        const auto r = run({"query", model_path("example2.vn"), "--r", "W", "--s", "X",
                            "--criterion", "numeric"});
        REQUIRE(r.rc == 1);
        REQUIRE(r.out == "not independent (numeric)\n");
    }
    SECTION("untabled models cannot answer numerically") {
        const auto r = run({"query", model_path("fig6.vn"), "--r", "W", "--s", "X",
                            "--criterion", "numeric"});
        REQUIRE(r.rc == 3);
        REQUIRE_THAT(r.err, ContainsSubstring("no table"));
    }
}

TEST_CASE("enumerate lists verdict lines", "[cli]") {
    SECTION("all triples up to the size cap") {
        const auto r = run({"enumerate", model_path("example1.vn"), "--max-size", "1"});
        REQUIRE(r.rc == 0);
        const auto lines = lines_of(r.out);
        // 4 choices of r, 3 of s, 2^2 conditioning sets.
        REQUIRE(lines.size() == 48);
        for (const auto& line : lines) {
            REQUIRE_THAT(line, StartsWith("r={"));
            REQUIRE_THAT(line, ContainsSubstring(" verdict="));
            REQUIRE_THAT(line, ContainsSubstring(" criterion=vn-separation"));
        }
    }
    SECTION("--independent-only filters the rest") {
        const auto all = run({"enumerate", model_path("fig9.vn")});
        const auto only =
            run({"enumerate", model_path("fig9.vn"), "--independent-only"});
        REQUIRE(only.rc == 0);
        const auto all_lines = lines_of(all.out);
        const auto only_lines = lines_of(only.out);
        REQUIRE(only_lines.size() < all_lines.size());
        REQUIRE_FALSE(only_lines.empty());
        std::size_t independent = 0;
        for (const auto& line : all_lines)
            if (line.find("verdict=independent") != std::string::npos) ++independent;
        REQUIRE(only_lines.size() == independent);
        for (const auto& line : only_lines)
            REQUIRE_THAT(line, ContainsSubstring("verdict=independent"));
    }
}

TEST_CASE("marginal computes by fusion", "[cli]") {
    SECTION("a single-variable target") {
        const auto r = run({"marginal", model_path("example2.vn"), "--target", "Z"});
        REQUIRE(r.rc == 0);
        const auto lines = lines_of(r.out);
        REQUIRE(lines.size() == 2);
        REQUIRE(lines[0] == "domain Z");
        std::istringstream vals(lines[1]);
        std::string word;
        vals >> word;
        REQUIRE(word == "values");
        double z0 = 0, z1 = 0;
        vals >> z0 >> z1;
        REQUIRE_THAT(z0, Catch::Matchers::WithinRel(0.526, 1e-9));
        REQUIRE_THAT(z1, Catch::Matchers::WithinRel(0.474, 1e-9));
    }
    SECTION("the domain line follows declaration order") {
        const auto r = run({"marginal", model_path("example2.vn"), "--target", "Z,V"});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, StartsWith("domain V Z\n"));
    }
    SECTION("--trace goes to stderr, the result to stdout") {
        const auto r = run({"marginal", model_path("example2.vn"), "--target", "Z",
                            "--trace"});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, StartsWith("domain Z\n"));
        REQUIRE_THAT(r.err, ContainsSubstring("fuse "));
    }
    SECTION("an empty target is a usage error") {
        const auto r = run({"marginal", model_path("example2.vn"), "--target", ""});
        REQUIRE(r.rc == 2);
        REQUIRE_THAT(r.err, ContainsSubstring("--target"));
    }
    SECTION("untabled models cannot be marginalized") {
        const auto r = run({"marginal", model_path("fig6.vn"), "--target", "W"});
        REQUIRE(r.rc == 3);
    }
}

TEST_CASE("convert rewrites graph models as network models", "[cli]") {
    const auto from_graph = run({"convert", model_path("fig9.dag")});
    REQUIRE(from_graph.rc == 0);
    REQUIRE_THAT(from_graph.out, StartsWith("kind probability\nmodel vn\n"));
    REQUIRE_THAT(from_graph.out, ContainsSubstring("cond Y head Y tail W X\n"));

    SECTION("the result agrees with the hand-written network form") {
        const auto from_vn = run({"convert", model_path("fig9.vn")});
        REQUIRE(from_vn.rc == 0);
        REQUIRE(from_graph.out == from_vn.out);
    }
    SECTION("the result is itself a valid, stable model file") {
        const auto m = parse_model(from_graph.out);
        REQUIRE(m.type == ModelType::vn);
        REQUIRE(serialize_model(m) == from_graph.out);
    }
}

TEST_CASE("compare cross-checks the criteria", "[cli]") {
    SECTION("a tabled network model agrees with its own joint") {
        const auto r = run({"compare", model_path("example2.vn")});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, EndsWith(" 0 disagreements\n"));
        REQUIRE(lines_of(r.out).size() == 1);  // no disagreement lines
    }
    SECTION("a dag model agrees across the graph criteria") {
        const auto r = run({"compare", model_path("fig9.dag"), "--max-size", "2"});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, EndsWith(" 0 disagreements\n"));
    }
}

TEST_CASE("random generates deterministic models", "[cli]") {
    SECTION("the same seed gives byte-identical output") {
        const std::vector<std::string> args{"random", "--kind", "dag", "--vars", "6",
                                            "--seed", "7"};
        const auto first = run(args);
        const auto second = run(args);
        REQUIRE(first.rc == 0);
        REQUIRE(first.out == second.out);
        const auto m = parse_model(first.out);
        REQUIRE(m.type == ModelType::dag);
        REQUIRE(m.network.variables().size() == 6);
        REQUIRE(m.network.fully_tabled());
    }
    SECTION("different seeds give different models") {
        const auto a = run({"random", "--kind", "vn", "--vars", "6", "--seed", "1"});
        const auto b = run({"random", "--kind", "vn", "--vars", "6", "--seed", "2"});
        REQUIRE(a.out != b.out);
    }
    SECTION("the algebra option is honoured") {
        const auto r = run({"random", "--kind", "ug", "--vars", "4", "--seed", "3",
                            "--algebra", "kappa"});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, StartsWith("kind kappa\n"));
        REQUIRE(parse_model(r.out).kind() == Algebra::kappa);
    }
    SECTION("out-of-range sizes are usage errors") {
        REQUIRE(run({"random", "--kind", "dag", "--vars", "25"}).rc == 2);
        REQUIRE(run({"random", "--kind", "dbg", "--vars", "4"}).rc == 2);
    }
}

TEST_CASE("dot renders the network", "[cli]") {
    const auto r = run({"dot", model_path("fig6.vn")});
    REQUIRE(r.rc == 0);
    REQUIRE_THAT(r.out, StartsWith("digraph valuation_network {"));
    REQUIRE_THAT(r.out, EndsWith("}\n"));
}

TEST_CASE("file problems map to exit code two", "[cli]") {
    SECTION("a missing file") {
        const auto r = run({"query", "no_such_model.vn", "--r", "A", "--s", "B"});
        REQUIRE(r.rc == 2);
        REQUIRE_THAT(r.err, ContainsSubstring("cannot open 'no_such_model.vn'"));
    }
    SECTION("a file that does not parse") {
        const auto path =
            (std::filesystem::temp_directory_path() / "valnet_cli_bad.vn").string();
        {
            std::ofstream f(path);
            f << "kind probability\nmodel vn\nfrobnicate\n";
        }
        const auto r = run({"dot", path});
        std::filesystem::remove(path);
        REQUIRE(r.rc == 2);
        REQUIRE_THAT(r.err, ContainsSubstring("line 3"));
        REQUIRE_THAT(r.err, ContainsSubstring("unknown directive"));
    }
    SECTION("a file with a semantic violation") {
        const auto path =
            (std::filesystem::temp_directory_path() / "valnet_cli_cycle.vn").string();
        {
            std::ofstream f(path);
            f << "kind probability\nmodel dag\nvar A 2\nvar B 2\narc A B\narc B A\n";
        }
        const auto r = run({"dot", path});
        std::filesystem::remove(path);
        REQUIRE(r.rc == 3);
        REQUIRE_THAT(r.err, ContainsSubstring("cycle"));
    }
}

TEST_CASE("usage problems map to exit code two", "[cli]") {
    REQUIRE(run({}).rc == 2);                                   // no subcommand
    REQUIRE(run({"transmogrify"}).rc == 2);                     // unknown subcommand
    REQUIRE(run({"query", model_path("fig9.vn"), "--r", "W"}).rc == 2);  // missing --s
    REQUIRE(run({"query", model_path("fig9.vn"), "--r", "W", "--s", "X", "--criterion",
                 "psychic"})
                .rc == 2);
    REQUIRE(run({"enumerate", model_path("fig9.vn"), "--max-size", "0"}).rc == 2);

    SECTION("--help succeeds and documents the subcommands") {
        const auto r = run({"--help"});
        REQUIRE(r.rc == 0);
        REQUIRE_THAT(r.out, ContainsSubstring("query"));
        REQUIRE_THAT(r.out, ContainsSubstring("marginal"));
    }
}
