#pragma once

// Command-line front end.  run_command is a pure function of its
// arguments (plus the filesystem for FILE operands) writing to the given
// streams, so the whole surface is testable in-process.
//
// Exit codes: 0 success; 1 query answered "not-derivable" / "not
// independent" (or `compare` found disagreements); 2 usage or file
// parse error; 3 semantic model error.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fusion.hpp"
#include "independence.hpp"
#include "model_io.hpp"
#include "random.hpp"

namespace valnet {

namespace detail {

inline VarSet parse_var_list(const std::string& csv) {
    VarSet out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ','))
        if (!item.empty()) out.insert(item);
    return out;
}

inline std::string verdict_word(Verdict v, Criterion c) {
    if (v == Verdict::independent) return "independent";
    return c == Criterion::numeric ? "not independent" : "not-derivable";
}

}  // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"valuation network toolkit"};
    app.require_subcommand(1);

    std::string file, r_csv, s_csv, v_csv, criterion = "vn", target_csv, to = "vn";
    std::string rand_kind, algebra = "probability";
    int max_size = 2, rand_vars = 0;
    std::uint64_t seed = 1;
    bool trace = false, independent_only = false;

    auto* query = app.add_subcommand("query", "answer one conditional independence query");
    query->add_option("file", file, "model file")->required();
    query->add_option("--r", r_csv, "first variable set (comma-separated)")->required();
    query->add_option("--s", s_csv, "second variable set")->required();
    query->add_option("--v", v_csv, "conditioning set (may be empty)");
    query->add_option("--criterion", criterion, "vn|dsep|moral|numeric")
        ->check(CLI::IsMember({"vn", "dsep", "moral", "numeric"}));
    query->add_flag("--trace", trace, "print the fusion trace to stderr");

    auto* enumerate = app.add_subcommand("enumerate", "list CI verdicts for all triples");
    enumerate->add_option("file", file, "model file")->required();
    enumerate->add_option("--max-size", max_size, "largest |r|, |s| considered")
        ->check(CLI::PositiveNumber);
    enumerate->add_flag("--independent-only", independent_only,
                        "print only triples judged independent");

    auto* marginal_cmd = app.add_subcommand("marginal", "compute a marginal by fusion");
    marginal_cmd->add_option("file", file, "model file")->required();
    marginal_cmd->add_option("--target", target_csv, "variables to keep (comma-separated)")
        ->required();
    marginal_cmd->add_flag("--trace", trace, "print the fusion trace to stderr");

    auto* convert = app.add_subcommand("convert", "convert a graph model to a vn model");
    convert->add_option("file", file, "model file")->required();
    convert->add_option("--to", to, "target model type (only vn)")
        ->check(CLI::IsMember({"vn"}));

    auto* compare = app.add_subcommand("compare", "cross-check all applicable criteria");
    compare->add_option("file", file, "model file")->required();
    compare->add_option("--max-size", max_size, "largest |r|, |s| considered")
        ->check(CLI::PositiveNumber);

    auto* random_cmd = app.add_subcommand("random", "generate a seeded random model");
    random_cmd->add_option("--kind", rand_kind, "dag|ug|vn")
        ->required()
        ->check(CLI::IsMember({"dag", "ug", "vn"}));
    random_cmd->add_option("--vars", rand_vars, "number of variables")
        ->required()
        ->check(CLI::Range(1, 20));
    random_cmd->add_option("--seed", seed, "random seed");
    random_cmd->add_option("--algebra", algebra, "probability|kappa|possibility")
        ->check(CLI::IsMember({"probability", "kappa", "possibility"}));

    auto* dot = app.add_subcommand("dot", "emit the valuation network in DOT form");
    dot->add_option("file", file, "model file")->required();

    std::vector<const char*> argv;
    argv.push_back("valnet");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const auto load = [&](ModelFile& m) -> int {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            err << "error: cannot open '" << file << "'\n";
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        m = parse_model(text.str());
        return 0;
    };

    try {
        if (app.got_subcommand(query)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            const VarSet r = detail::parse_var_list(r_csv);
            const VarSet s = detail::parse_var_list(s_csv);
            const VarSet v = detail::parse_var_list(v_csv);
            CIStatement st;
            if (criterion == "vn") {
                FusionTrace ft;
                st = ci_structural(m.network, r, s, v, trace ? &ft : nullptr);
                if (trace) err << ft.to_text();
            } else if (criterion == "dsep" || criterion == "moral") {
                if (!m.dag)
                    throw InvalidModel("criterion '" + criterion + "' requires a dag model");
                const bool sep = criterion == "dsep" ? d_separated(*m.dag, r, s, v)
                                                     : moral_separated(*m.dag, r, s, v);
                st = CIStatement{r, s, v, sep ? Verdict::independent : Verdict::not_derivable,
                                 criterion == "dsep" ? Criterion::d_separation
                                                     : Criterion::moralization};
            } else {  // numeric
                st = ci_numeric(m.network.joint(), r, s, v);
            }
            out << detail::verdict_word(st.verdict, st.criterion) << " ("
                << to_string(st.criterion) << ")\n";
            return st.verdict == Verdict::independent ? 0 : 1;
        }

        if (app.got_subcommand(enumerate)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            for (const auto& st : enumerate_ci(m.network, max_size))
                if (!independent_only || st.verdict == Verdict::independent)
                    out << st.to_line() << "\n";
            return 0;
        }

        if (app.got_subcommand(marginal_cmd)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            const VarSet target = detail::parse_var_list(target_csv);
            if (target.empty()) {
                err << "error: --target must name at least one variable\n";
                return 2;
            }
            FusionTrace ft;
            const Valuation result = marginal(m.network, target, trace ? &ft : nullptr);
            if (trace) err << ft.to_text();
            out << "domain";
            for (const auto& var : result.domain().variables()) out << " " << var.name;
            out << "\nvalues";
            for (const double x : result.values()) out << " " << detail::format_number(x);
            out << "\n";
            return 0;
        }

        if (app.got_subcommand(convert)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            ModelFile converted;
            converted.type = ModelType::vn;
            converted.network = m.network;
            out << serialize_model(converted);
            return 0;
        }

        if (app.got_subcommand(compare)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            const bool graph_criteria = m.dag.has_value();
            const bool numeric_criteria =
                m.network.fully_tabled() && m.kind() != Algebra::possibility;
            Valuation joint = Valuation::identity(m.kind(), Domain());
            if (numeric_criteria) joint = m.network.joint();

            std::size_t checked = 0, disagreements = 0;
            const auto report = [&](const CIStatement& st, const std::string& left,
                                    const std::string& lval, const std::string& right,
                                    const std::string& rval) {
                ++disagreements;
                out << "disagree r=" << detail::braced(st.r) << " s=" << detail::braced(st.s)
                    << " v=" << detail::braced(st.v) << ": " << left << "=" << lval << " "
                    << right << "=" << rval << "\n";
            };
            for (const auto& st : enumerate_ci(m.network, max_size)) {
                ++checked;
                const bool vn_ind = st.verdict == Verdict::independent;
                bool ds = false, mo = false;
                if (graph_criteria) {
                    ds = d_separated(*m.dag, st.r, st.s, st.v);
                    mo = moral_separated(*m.dag, st.r, st.s, st.v);
                    if (ds != mo)
                        report(st, "d-separation", ds ? "independent" : "not-derivable",
                               "moralization", mo ? "independent" : "not-derivable");
                    if (vn_ind != ds)
                        report(st, "vn-separation", vn_ind ? "independent" : "not-derivable",
                               "d-separation", ds ? "independent" : "not-derivable");
                }
                if (numeric_criteria) {
                    const bool num =
                        ci_numeric(joint, st.r, st.s, st.v).verdict == Verdict::independent;
                    if (vn_ind && !num)
                        report(st, "vn-separation", "independent", "numeric",
                               "not independent");
                    if (graph_criteria && ds && !num)
                        report(st, "d-separation", "independent", "numeric",
                               "not independent");
                }
            }
            out << "checked " << checked << " triples, " << disagreements
                << " disagreements\n";
            return disagreements ? 1 : 0;
        }

        if (app.got_subcommand(random_cmd)) {
            const ModelFile m = random_model(*model_type_from(rand_kind), rand_vars, seed,
                                             *algebra_from(algebra));
            out << serialize_model(m);
            return 0;
        }

        if (app.got_subcommand(dot)) {
            ModelFile m;
            if (const int rc = load(m)) return rc;
            out << m.network.to_dot();
            return 0;
        }
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;  // unreachable: require_subcommand(1) guarantees a branch
}

}  // namespace valnet
