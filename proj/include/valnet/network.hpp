#pragma once

// Valuation networks: a set of variables plus named valuation nodes, each
// covering a domain and optionally claiming a conditional head.  The
// bipartite node-variable graph has an undirected edge for every tail (or
// plain-domain) membership and a directed arc into every head variable.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "valuation.hpp"

namespace valnet {

// One node of a network.  `head` empty means a plain (unconditional)
// valuation; otherwise the node claims to be a conditional for its head
// variables given the rest of its domain (the tail).  The table is
// optional so that purely structural models can be analyzed.
struct ValuationNode {
    std::string name;
    Domain domain;
    Domain head;  // subset of domain; empty for plain nodes
    std::optional<Valuation> table;

    bool is_conditional() const { return !head.empty(); }

    Domain tail() const { return domain.minus(head.names()); }
};

enum class Verdict { independent, not_derivable };
enum class Criterion { vn_separation, d_separation, moralization, numeric };

inline std::string to_string(Verdict v) {
    return v == Verdict::independent ? "independent" : "not-derivable";
}

inline std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::vn_separation: return "vn-separation";
        case Criterion::d_separation: return "d-separation";
        case Criterion::moralization: return "moralization";
        case Criterion::numeric: return "numeric";
    }
    return "?";
}

// A conditional-independence judgment "r independent of s given v".
struct CIStatement {
    VarSet r, s, v;
    Verdict verdict = Verdict::not_derivable;
    Criterion criterion = Criterion::vn_separation;

    std::string to_line() const {
        std::ostringstream out;
        out << "r=" << detail::braced(r) << " s=" << detail::braced(s)
            << " v=" << detail::braced(v) << " verdict=" << to_string(verdict)
            << " criterion=" << to_string(criterion);
        return out.str();
    }
};

class ValuationNetwork {
public:
    ValuationNetwork() = default;

    // Validates and constructs.  Rules:
    //  - node names unique, node domains within the declared variables
    //  - a variable is the head of at most one node
    //  - the head->tail dependency between nodes is acyclic
    //  - tables (where present) match the network's calculus and their
    //    node's domain
    static ValuationNetwork build(Algebra kind, std::vector<Variable> variables,
                                  std::vector<ValuationNode> nodes) {
        ValuationNetwork net;
        net.kind_ = kind;
        net.variables_ = std::move(variables);
        net.nodes_ = std::move(nodes);
        net.validate();
        return net;
    }

    Algebra kind() const { return kind_; }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<ValuationNode>& nodes() const { return nodes_; }

    bool has_variable(const std::string& name) const { return var_index(name) >= 0; }

    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (variables_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    const ValuationNode* find_node(const std::string& name) const {
        for (const auto& n : nodes_)
            if (n.name == name) return &n;
        return nullptr;
    }

    // The declared variables named in `names`, in declaration order.
    Domain domain_of(const VarSet& names) const {
        std::vector<Variable> vars;
        for (const auto& v : variables_)
            if (names.count(v.name)) vars.push_back(v);
        if (vars.size() != names.size()) {
            for (const auto& n : names)
                if (!has_variable(n)) throw DomainError("unknown variable '" + n + "'");
        }
        return Domain(std::move(vars));
    }

    bool fully_tabled() const {
        for (const auto& n : nodes_)
            if (!n.table) return false;
        return true;
    }

    // First node lacking a table, for error messages.
    std::string first_untabled() const {
        for (const auto& n : nodes_)
            if (!n.table) return n.name;
        return {};
    }

    // Undirected edges (node name, variable name): tail and plain-domain
    // memberships.  Derived from the node list, so the four-tuple view is
    // consistent by construction.
    std::vector<std::pair<std::string, std::string>> edges() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& n : nodes_)
            for (const auto& v : n.domain.variables())
                if (!n.head.contains(v.name)) out.emplace_back(n.name, v.name);
        return out;
    }

    // Directed arcs (node name, head variable name).
    std::vector<std::pair<std::string, std::string>> arcs() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& n : nodes_)
            for (const auto& v : n.head.variables()) out.emplace_back(n.name, v.name);
        return out;
    }

    // Combination of all node tables; the identity scalar for an empty
    // network.  Requires every node to carry a table.
    Valuation joint() const {
        if (!fully_tabled())
            throw InvalidModel("node '" + first_untabled() + "' has no table");
        Valuation acc = Valuation::identity(kind_, Domain{});
        for (const auto& n : nodes_) acc = combine(acc, *n.table);
        return acc;
    }

    // Vertex separation in the bipartite graph: after deleting the
    // variables in `v`, no path connects a variable of `r` to one of `s`.
    // Arc direction is ignored.  r, s, v must be disjoint declared
    // variables; empty r or s is trivially separated.
    bool separated(const VarSet& r, const VarSet& s, const VarSet& v) const {
        check_disjoint_known(r, s, v);
        const std::uint64_t mr = mask_of(r), ms = mask_of(s), mv = mask_of(v);
        std::uint64_t reach = mr;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& n : nodes_) {
                const std::uint64_t dm = mask_of(n.domain.names()) & ~mv;
                if ((dm & reach) && (dm & ~reach)) {
                    reach |= dm;
                    grew = true;
                }
            }
        }
        return (reach & ms) == 0;
    }

    // Deterministic DOT rendering of the bipartite graph: variables as
    // circles, valuation nodes as boxes, arcs drawn with arrowheads.
    std::string to_dot() const {
        std::ostringstream out;
        out << "digraph valuation_network {\n";
        out << "  node [shape=circle];\n";
        for (const auto& v : variables_)
            out << "  \"var:" << v.name << "\" [label=\"" << v.name << "\"];\n";
        out << "  node [shape=box];\n";
        for (const auto& n : nodes_)
            out << "  \"val:" << n.name << "\" [label=\"" << n.name << "\"];\n";
        for (const auto& n : nodes_) {
            for (const auto& v : n.domain.variables()) {
                if (n.head.contains(v.name))
                    out << "  \"val:" << n.name << "\" -> \"var:" << v.name << "\";\n";
                else
                    out << "  \"val:" << n.name << "\" -> \"var:" << v.name
                        << "\" [dir=none];\n";
            }
        }
        out << "}\n";
        return out.str();
    }

    // Bitmask over the declared-variable order; shared with the fusion
    // engine.  Networks are capped at 64 variables.
    std::uint64_t mask_of(const VarSet& names) const {
        std::uint64_t m = 0;
        for (const auto& name : names) {
            int i = var_index(name);
            if (i < 0) throw DomainError("unknown variable '" + name + "'");
            m |= std::uint64_t(1) << i;
        }
        return m;
    }

    void check_disjoint_known(const VarSet& r, const VarSet& s, const VarSet& v) const {
        for (const auto& set : {&r, &s, &v})
            for (const auto& name : *set)
                if (!has_variable(name)) throw DomainError("unknown variable '" + name + "'");
        for (const auto& name : r)
            if (s.count(name) || v.count(name))
                throw DomainError("variable '" + name + "' appears in two query sets");
        for (const auto& name : s)
            if (v.count(name))
                throw DomainError("variable '" + name + "' appears in two query sets");
    }

private:
    void validate() const {
        if (variables_.size() > 64)
            throw InvalidModel("networks with more than 64 variables are not supported");
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            if (variables_[i].frame_size < 1)
                throw InvalidModel("variable '" + variables_[i].name + "' has frame size " +
                                   std::to_string(variables_[i].frame_size));
            for (std::size_t j = i + 1; j < variables_.size(); ++j)
                if (variables_[i].name == variables_[j].name)
                    throw InvalidModel("duplicate variable '" + variables_[i].name + "'");
        }
        std::map<std::string, std::string> head_owner;  // variable -> node
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            if (n.name.empty()) throw InvalidModel("node with empty name");
            for (std::size_t j = i + 1; j < nodes_.size(); ++j)
                if (n.name == nodes_[j].name)
                    throw InvalidModel("duplicate node name '" + n.name + "'");
            for (const auto& v : n.domain.variables()) {
                int k = var_index(v.name);
                if (k < 0)
                    throw InvalidModel("unknown variable '" + v.name + "' in node '" +
                                       n.name + "'");
                if (variables_[static_cast<std::size_t>(k)].frame_size != v.frame_size)
                    throw InvalidModel("variable '" + v.name +
                                       "' has conflicting frame sizes in node '" + n.name +
                                       "'");
            }
            if (!n.head.subset_of(n.domain))
                throw InvalidModel("head of node '" + n.name + "' is not inside its domain");
            for (const auto& v : n.head.variables()) {
                auto [it, fresh] = head_owner.emplace(v.name, n.name);
                if (!fresh)
                    throw InvalidModel("variable '" + v.name + "' is the head of nodes '" +
                                       it->second + "' and '" + n.name + "'");
            }
            if (n.table) {
                if (n.table->kind() != kind_)
                    throw InvalidModel("node '" + n.name + "' table kind is " +
                                       to_string(n.table->kind()) + ", network is " +
                                       to_string(kind_));
                if (!n.table->domain().same_set(n.domain))
                    throw InvalidModel("table of node '" + n.name +
                                       "' does not cover its domain");
            }
        }
        check_conditional_acyclic();
    }

    // Node A depends on node B when some tail variable of A is headed by
    // B.  That relation must be acyclic.
    void check_conditional_acyclic() const {
        std::map<std::string, std::size_t> owner;  // head variable -> node index
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (const auto& v : nodes_[i].head.variables()) owner[v.name] = i;
        std::vector<std::vector<std::size_t>> deps(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Domain tail = nodes_[i].tail();
            for (const auto& v : tail.variables()) {
                auto it = owner.find(v.name);
                if (it != owner.end()) deps[i].push_back(it->second);
            }
        }
        std::vector<int> color(nodes_.size(), 0);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (color[i] == 0 && has_cycle(i, deps, color))
                throw InvalidModel("conditional structure is cyclic at node '" +
                                   nodes_[i].name + "'");
    }

    static bool has_cycle(std::size_t i, const std::vector<std::vector<std::size_t>>& deps,
                          std::vector<int>& color) {
        color[i] = 1;
        for (std::size_t j : deps[i]) {
            if (color[j] == 1) return true;
            if (color[j] == 0 && has_cycle(j, deps, color)) return true;
        }
        color[i] = 2;
        return false;
    }

    Algebra kind_ = Algebra::probability;
    std::vector<Variable> variables_;
    std::vector<ValuationNode> nodes_;
};

}  // namespace valnet
