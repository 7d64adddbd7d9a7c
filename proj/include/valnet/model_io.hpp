#pragma once

// Line-oriented model file format: parsing, canonical serialization,
// and structural equality.  The format is documented in README.md.
//
// Errors: malformed lines and references to undeclared names raise
// ParseError carrying the 1-based line number; cross-line semantic
// violations (cycles, head ownership, table-value constraints) surface
// from the structure validators as InvalidModel / InvalidValuation.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphs.hpp"
#include "network.hpp"

namespace valnet {

enum class ModelType { vn, ug, dag, dbg, rcg };

inline std::string to_string(ModelType t) {
    switch (t) {
        case ModelType::vn: return "vn";
        case ModelType::ug: return "ug";
        case ModelType::dag: return "dag";
        case ModelType::dbg: return "dbg";
        case ModelType::rcg: return "rcg";
    }
    return "?";
}

inline std::optional<ModelType> model_type_from(const std::string& s) {
    if (s == "vn") return ModelType::vn;
    if (s == "ug") return ModelType::ug;
    if (s == "dag") return ModelType::dag;
    if (s == "dbg") return ModelType::dbg;
    if (s == "rcg") return ModelType::rcg;
    return std::nullopt;
}

inline std::optional<Algebra> algebra_from(const std::string& s) {
    if (s == "probability") return Algebra::probability;
    if (s == "kappa") return Algebra::kappa;
    if (s == "possibility") return Algebra::possibility;
    return std::nullopt;
}

// A parsed model: the declared structure (for graph models) plus the
// valuation network it denotes (graph models are converted on parse).
struct ModelFile {
    ModelType type = ModelType::vn;
    std::optional<UndirectedGraph> ug;
    std::optional<Dag> dag;
    std::optional<BalloonGraph> dbg;
    std::optional<RecursiveCausalGraph> rcg;
    ValuationNetwork network;

    Algebra kind() const { return network.kind(); }
};

namespace detail {

inline std::string format_number(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& tok, int line) {
    if (tok == "inf") return kInf;
    double v = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError(line, "bad number '" + tok + "'");
    return v;
}

inline int parse_int(const std::string& tok, int line) {
    int v = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ParseError(line, "bad integer '" + tok + "'");
    return v;
}

struct RawLine {
    int number = 0;
    std::vector<std::string> tokens;
};

inline std::vector<RawLine> tokenize_model(const std::string& text) {
    std::vector<RawLine> out;
    std::istringstream stream(text);
    std::string line;
    int number = 0;
    while (std::getline(stream, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        RawLine raw;
        raw.number = number;
        std::string tok;
        while (ls >> tok) raw.tokens.push_back(tok);
        if (!raw.tokens.empty()) out.push_back(std::move(raw));
    }
    return out;
}

}  // namespace detail

inline ModelFile parse_model(const std::string& text) {
    const auto lines = detail::tokenize_model(text);

    std::optional<Algebra> kind;
    std::optional<ModelType> type;
    std::vector<Variable> vars;
    std::map<std::string, int> var_line;  // name -> declaring line

    const auto lookup_var = [&](const std::string& name, int line) -> const Variable& {
        for (const auto& v : vars)
            if (v.name == name) return v;
        throw ParseError(line, "unknown variable '" + name + "'");
    };

    struct RawNode {
        int line;
        bool conditional;
        std::string name;
        std::vector<std::string> head, tail;  // val: head empty, tail = domain
    };
    struct RawTable {
        int line;
        std::string node;
        std::vector<double> values;
    };
    std::vector<RawNode> raw_nodes;
    std::vector<RawTable> raw_tables;
    std::vector<std::pair<std::string, std::string>> edges, arcs;
    std::vector<Balloon> balloons;
    std::set<std::string> exo;

    const auto require_type = [&](ModelType want, const detail::RawLine& l) {
        if (!type) throw ParseError(l.number, "'" + l.tokens[0] + "' before 'model' line");
        if (*type != want)
            throw ParseError(l.number, "'" + l.tokens[0] + "' line not allowed in a '" +
                                           to_string(*type) + "' model");
    };

    for (const auto& l : lines) {
        const auto& t = l.tokens;
        const std::string& op = t[0];
        if (op == "kind") {
            if (kind) throw ParseError(l.number, "duplicate 'kind' line");
            if (t.size() != 2) throw ParseError(l.number, "expected: kind <algebra>");
            kind = algebra_from(t[1]);
            if (!kind) throw ParseError(l.number, "unknown algebra '" + t[1] + "'");
        } else if (op == "model") {
            if (type) throw ParseError(l.number, "duplicate 'model' line");
            if (t.size() != 2) throw ParseError(l.number, "expected: model <type>");
            type = model_type_from(t[1]);
            if (!type) throw ParseError(l.number, "unknown model type '" + t[1] + "'");
        } else if (op == "var") {
            if (t.size() != 3) throw ParseError(l.number, "expected: var <name> <frame-size>");
            if (var_line.count(t[1]))
                throw ParseError(l.number, "duplicate variable '" + t[1] + "'");
            vars.push_back(Variable{t[1], detail::parse_int(t[2], l.number)});
            var_line[t[1]] = l.number;
        } else if (op == "val" || op == "cond") {
            require_type(ModelType::vn, l);
            if (t.size() < 2) throw ParseError(l.number, "expected: " + op + " <name> ...");
            RawNode n;
            n.line = l.number;
            n.conditional = op == "cond";
            n.name = t[1];
            if (!n.conditional) {
                n.tail.assign(t.begin() + 2, t.end());
            } else {
                if (t.size() < 3 || t[2] != "head")
                    throw ParseError(l.number,
                                     "expected: cond <name> head <vars...> [tail <vars...>]");
                std::size_t i = 3;
                for (; i < t.size() && t[i] != "tail"; ++i) n.head.push_back(t[i]);
                if (n.head.empty())
                    throw ParseError(l.number, "conditional node '" + n.name +
                                                   "' has an empty head");
                if (i < t.size()) {  // t[i] == "tail"
                    for (++i; i < t.size(); ++i) n.tail.push_back(t[i]);
                    if (n.tail.empty())
                        throw ParseError(l.number, "'tail' keyword with no variables");
                }
            }
            raw_nodes.push_back(std::move(n));
        } else if (op == "edge") {
            if (!type) throw ParseError(l.number, "'edge' before 'model' line");
            if (*type != ModelType::ug && *type != ModelType::rcg)
                throw ParseError(l.number, "'edge' line not allowed in a '" +
                                               to_string(*type) + "' model");
            if (t.size() != 3) throw ParseError(l.number, "expected: edge <a> <b>");
            lookup_var(t[1], l.number);
            lookup_var(t[2], l.number);
            edges.emplace_back(t[1], t[2]);
        } else if (op == "arc") {
            if (!type) throw ParseError(l.number, "'arc' before 'model' line");
            if (*type != ModelType::dag && *type != ModelType::rcg)
                throw ParseError(l.number, "'arc' line not allowed in a '" +
                                               to_string(*type) + "' model");
            if (t.size() != 3) throw ParseError(l.number, "expected: arc <from> <to>");
            lookup_var(t[1], l.number);
            lookup_var(t[2], l.number);
            arcs.emplace_back(t[1], t[2]);
        } else if (op == "balloon") {
            require_type(ModelType::dbg, l);
            if (t.size() < 3)
                throw ParseError(l.number,
                                 "expected: balloon <name> <members...> [parents <vars...>]");
            Balloon b;
            b.name = t[1];
            std::size_t i = 2;
            for (; i < t.size() && t[i] != "parents"; ++i) {
                lookup_var(t[i], l.number);
                b.members.push_back(t[i]);
            }
            if (i < t.size()) {
                for (++i; i < t.size(); ++i) {
                    lookup_var(t[i], l.number);
                    b.parents.push_back(t[i]);
                }
                if (b.parents.empty())
                    throw ParseError(l.number, "'parents' keyword with no variables");
            }
            if (b.members.empty())
                throw ParseError(l.number, "balloon '" + b.name + "' has no members");
            balloons.push_back(std::move(b));
        } else if (op == "exo") {
            require_type(ModelType::rcg, l);
            if (t.size() < 2) throw ParseError(l.number, "expected: exo <name>...");
            for (std::size_t i = 1; i < t.size(); ++i) {
                lookup_var(t[i], l.number);
                exo.insert(t[i]);
            }
        } else if (op == "table") {
            if (t.size() < 2) throw ParseError(l.number, "expected: table <node> <values...>");
            RawTable tab;
            tab.line = l.number;
            tab.node = t[1];
            for (std::size_t i = 2; i < t.size(); ++i)
                tab.values.push_back(detail::parse_number(t[i], l.number));
            raw_tables.push_back(std::move(tab));
        } else {
            throw ParseError(l.number, "unknown directive '" + op + "'");
        }
    }

    if (!kind) throw ParseError(lines.empty() ? 1 : lines.back().number, "missing 'kind' line");
    if (!type) throw ParseError(lines.back().number, "missing 'model' line");

    ModelFile m;
    m.type = *type;
    switch (*type) {
        case ModelType::vn: {
            std::vector<ValuationNode> nodes;
            for (const auto& rn : raw_nodes) {
                ValuationNode n;
                n.name = rn.name;
                std::vector<Variable> dom, head;
                for (const auto& h : rn.head) {
                    dom.push_back(lookup_var(h, rn.line));
                    head.push_back(lookup_var(h, rn.line));
                }
                for (const auto& v : rn.tail) dom.push_back(lookup_var(v, rn.line));
                try {
                    n.domain = Domain(std::move(dom));
                    n.head = Domain(std::move(head));
                } catch (const Error& e) {
                    throw ParseError(rn.line, e.what());
                }
                nodes.push_back(std::move(n));
            }
            m.network = ValuationNetwork::build(*kind, vars, std::move(nodes));
            break;
        }
        case ModelType::ug:
            m.ug = UndirectedGraph::build(vars, edges);
            m.network = from_ug(*m.ug, *kind);
            break;
        case ModelType::dag:
            m.dag = Dag::build(vars, arcs);
            m.network = from_dag(*m.dag, *kind);
            break;
        case ModelType::dbg:
            m.dbg = BalloonGraph::build(vars, balloons);
            m.network = from_dbg(*m.dbg, *kind);
            break;
        case ModelType::rcg:
            m.rcg = RecursiveCausalGraph::build(vars, exo, edges, arcs);
            m.network = from_rcg(*m.rcg, *kind);
            break;
    }

    if (!raw_tables.empty()) {
        std::vector<ValuationNode> nodes = m.network.nodes();
        for (const auto& tab : raw_tables) {
            ValuationNode* node = nullptr;
            for (auto& n : nodes)
                if (n.name == tab.node) node = &n;
            if (!node) throw ParseError(tab.line, "table for unknown node '" + tab.node + "'");
            if (node->table)
                throw ParseError(tab.line, "duplicate table for node '" + tab.node + "'");
            if (tab.values.size() != node->domain.table_size())
                throw ParseError(tab.line, "table for node '" + tab.node + "' has " +
                                               std::to_string(tab.values.size()) +
                                               " entries, expected " +
                                               std::to_string(node->domain.table_size()));
            node->table = Valuation(*kind, node->domain, tab.values);
        }
        m.network = ValuationNetwork::build(*kind, vars, std::move(nodes));
    }
    return m;
}

// Canonical text form.  parse_model(serialize_model(m)) reproduces m,
// and two models are equal exactly when their canonical texts match.
inline std::string serialize_model(const ModelFile& m) {
    std::string out;
    out += "kind " + to_string(m.network.kind()) + "\n";
    out += "model " + to_string(m.type) + "\n";
    for (const auto& v : m.network.variables())
        out += "var " + v.name + " " + std::to_string(v.frame_size) + "\n";

    switch (m.type) {
        case ModelType::vn:
            for (const auto& n : m.network.nodes()) {
                if (n.is_conditional()) {
                    out += "cond " + n.name + " head";
                    for (const auto& v : n.head.variables()) out += " " + v.name;
                    const Domain tail = n.tail();
                    if (!tail.empty()) {
                        out += " tail";
                        for (const auto& v : tail.variables()) out += " " + v.name;
                    }
                } else {
                    out += "val " + n.name;
                    for (const auto& v : n.domain.variables()) out += " " + v.name;
                }
                out += "\n";
            }
            break;
        case ModelType::ug:
            for (const auto& e : m.ug->edges)
                out += "edge " + e.first + " " + e.second + "\n";
            break;
        case ModelType::dag:
            for (const auto& a : m.dag->arcs) out += "arc " + a.first + " " + a.second + "\n";
            break;
        case ModelType::dbg:
            for (const auto& b : m.dbg->balloons) {
                out += "balloon " + b.name;
                for (const auto& v : b.members) out += " " + v;
                if (!b.parents.empty()) {
                    out += " parents";
                    for (const auto& v : b.parents) out += " " + v;
                }
                out += "\n";
            }
            break;
        case ModelType::rcg:
            for (const auto& v : m.rcg->exogenous) out += "exo " + v + "\n";
            for (const auto& e : m.rcg->edges)
                out += "edge " + e.first + " " + e.second + "\n";
            for (const auto& a : m.rcg->arcs) out += "arc " + a.first + " " + a.second + "\n";
            break;
    }

    for (const auto& n : m.network.nodes()) {
        if (!n.table) continue;
        out += "table " + n.name;
        for (double v : n.table->values()) out += " " + detail::format_number(v);
        out += "\n";
    }
    return out;
}

inline bool models_equal(const ModelFile& a, const ModelFile& b) {
    return serialize_model(a) == serialize_model(b);
}

}  // namespace valnet
