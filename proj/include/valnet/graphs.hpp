#pragma once

// Graphical input models (undirected graphs, DAGs, directed balloon
// graphs, recursive causal graphs), their conversion into valuation
// networks, and two independent DAG separation oracles used to
// cross-validate the structural CI test.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "network.hpp"

namespace valnet {

namespace detail {

inline void check_vertices(const std::vector<Variable>& vertices) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i].name.empty()) throw InvalidModel("variable with empty name");
        if (vertices[i].frame_size < 1)
            throw InvalidModel("variable '" + vertices[i].name + "' has frame size " +
                               std::to_string(vertices[i].frame_size));
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            if (vertices[i].name == vertices[j].name)
                throw InvalidModel("duplicate variable '" + vertices[i].name + "'");
    }
}

inline int index_of(const std::vector<Variable>& vertices, const std::string& name) {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].name == name) return static_cast<int>(i);
    return -1;
}

inline int require_vertex(const std::vector<Variable>& vertices, const std::string& name) {
    int i = index_of(vertices, name);
    if (i < 0) throw InvalidModel("unknown variable '" + name + "'");
    return i;
}

// Maximal cliques of an undirected graph given as adjacency masks, by
// pivoted Bron-Kerbosch.  Exact; intended for desk-scale graphs.
inline void bron_kerbosch(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                          const std::vector<std::uint64_t>& adj,
                          std::vector<std::uint64_t>& out) {
    if (!p && !x) {
        out.push_back(r);
        return;
    }
    // Pivot on the candidate covering most of p.
    int pivot = -1, best = -1;
    for (std::uint64_t m = p | x; m;) {
        const int u = std::countr_zero(m);
        m &= m - 1;
        const int cover = std::popcount(p & adj[static_cast<std::size_t>(u)]);
        if (cover > best) {
            best = cover;
            pivot = u;
        }
    }
    std::uint64_t cand = p & ~adj[static_cast<std::size_t>(pivot)];
    while (cand) {
        const int v = std::countr_zero(cand);
        const std::uint64_t vbit = std::uint64_t(1) << v;
        cand &= cand - 1;
        bron_kerbosch(r | vbit, p & adj[static_cast<std::size_t>(v)],
                      x & adj[static_cast<std::size_t>(v)], adj, out);
        p &= ~vbit;
        x |= vbit;
    }
}

inline std::vector<std::uint64_t> maximal_cliques(std::size_t n,
                                                  const std::vector<std::uint64_t>& adj) {
    if (n > 64) throw InvalidModel("graphs with more than 64 vertices are not supported");
    std::vector<std::uint64_t> out;
    const std::uint64_t all = n == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << n) - 1;
    if (n) bron_kerbosch(0, all, 0, adj, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Undirected graph

struct UndirectedGraph {
    std::vector<Variable> vertices;
    // Canonical: name-ordered pairs, sorted, deduplicated.
    std::vector<std::pair<std::string, std::string>> edges;

    static UndirectedGraph build(std::vector<Variable> vertices,
                                 std::vector<std::pair<std::string, std::string>> edges) {
        detail::check_vertices(vertices);
        std::set<std::pair<std::string, std::string>> canon;
        for (auto& e : edges) {
            detail::require_vertex(vertices, e.first);
            detail::require_vertex(vertices, e.second);
            if (e.first == e.second)
                throw InvalidModel("self-loop on variable '" + e.first + "'");
            canon.insert(e.first < e.second ? e : std::make_pair(e.second, e.first));
        }
        UndirectedGraph g;
        g.vertices = std::move(vertices);
        g.edges.assign(canon.begin(), canon.end());
        return g;
    }

    std::vector<std::uint64_t> adjacency() const {
        std::vector<std::uint64_t> adj(vertices.size(), 0);
        for (const auto& e : edges) {
            const int i = detail::index_of(vertices, e.first);
            const int j = detail::index_of(vertices, e.second);
            adj[static_cast<std::size_t>(i)] |= std::uint64_t(1) << j;
            adj[static_cast<std::size_t>(j)] |= std::uint64_t(1) << i;
        }
        return adj;
    }
};

// Plain vertex separation in an undirected graph: after deleting c, no
// path joins a to b.
inline bool ug_separated(const UndirectedGraph& g, const VarSet& a, const VarSet& b,
                         const VarSet& c) {
    for (const auto& set : {&a, &b, &c})
        for (const auto& name : *set)
            if (detail::index_of(g.vertices, name) < 0)
                throw DomainError("unknown variable '" + name + "'");
    for (const auto& name : a)
        if (b.count(name) || c.count(name))
            throw DomainError("variable '" + name + "' appears in two query sets");
    for (const auto& name : b)
        if (c.count(name)) throw DomainError("variable '" + name + "' appears in two query sets");
    const auto adj = g.adjacency();
    std::uint64_t reach = 0, target = 0, cut = 0;
    for (const auto& name : a)
        reach |= std::uint64_t(1) << detail::index_of(g.vertices, name);
    for (const auto& name : b)
        target |= std::uint64_t(1) << detail::index_of(g.vertices, name);
    for (const auto& name : c)
        cut |= std::uint64_t(1) << detail::index_of(g.vertices, name);
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < g.vertices.size(); ++i) {
            if (!(reach >> i & 1)) continue;
            const std::uint64_t next = adj[i] & ~cut & ~reach;
            if (next) {
                reach |= next;
                grew = true;
            }
        }
    }
    return (reach & target) == 0;
}

// ---------------------------------------------------------------------------
// Directed acyclic graph

struct Dag {
    std::vector<Variable> vertices;
    // Canonical: sorted, deduplicated (parent, child) pairs.
    std::vector<std::pair<std::string, std::string>> arcs;

    static Dag build(std::vector<Variable> vertices,
                     std::vector<std::pair<std::string, std::string>> arcs) {
        detail::check_vertices(vertices);
        std::set<std::pair<std::string, std::string>> canon;
        for (auto& a : arcs) {
            detail::require_vertex(vertices, a.first);
            detail::require_vertex(vertices, a.second);
            if (a.first == a.second)
                throw InvalidModel("self-loop on variable '" + a.first + "'");
            canon.insert(a);
        }
        Dag g;
        g.vertices = std::move(vertices);
        g.arcs.assign(canon.begin(), canon.end());
        g.check_acyclic();
        return g;
    }

    // Parent names of `child`, in variable declaration order.
    std::vector<std::string> parents(const std::string& child) const {
        std::vector<std::string> out;
        for (const auto& v : vertices)
            for (const auto& a : arcs)
                if (a.second == child && a.first == v.name) out.push_back(v.name);
        return out;
    }

    void check_acyclic() const {
        std::map<std::string, std::vector<std::string>> next;
        for (const auto& a : arcs) next[a.first].push_back(a.second);
        std::map<std::string, int> color;
        const std::function<bool(const std::string&)> visit = [&](const std::string& u) {
            color[u] = 1;
            for (const auto& w : next[u]) {
                if (color[w] == 1) return true;
                if (color[w] == 0 && visit(w)) return true;
            }
            color[u] = 2;
            return false;
        };
        for (const auto& v : vertices)
            if (color[v.name] == 0 && visit(v.name))
                throw InvalidModel("directed graph has a cycle through '" + v.name + "'");
    }
};

// ---------------------------------------------------------------------------
// Directed balloon graph: balloons partition the variables; each balloon
// has parent variables outside itself, and the balloon-level dependency
// must be acyclic.

struct Balloon {
    std::string name;
    std::vector<std::string> members;
    std::vector<std::string> parents;
};

struct BalloonGraph {
    std::vector<Variable> variables;
    std::vector<Balloon> balloons;

    static BalloonGraph build(std::vector<Variable> variables, std::vector<Balloon> balloons) {
        detail::check_vertices(variables);
        std::map<std::string, std::size_t> member_of;  // variable -> balloon index
        for (std::size_t i = 0; i < balloons.size(); ++i) {
            const auto& b = balloons[i];
            if (b.name.empty()) throw InvalidModel("balloon with empty name");
            if (b.members.empty())
                throw InvalidModel("balloon '" + b.name + "' has no members");
            for (std::size_t j = i + 1; j < balloons.size(); ++j)
                if (b.name == balloons[j].name)
                    throw InvalidModel("duplicate balloon name '" + b.name + "'");
            for (const auto& m : b.members) {
                detail::require_vertex(variables, m);
                auto [it, fresh] = member_of.emplace(m, i);
                if (!fresh)
                    throw InvalidModel("variable '" + m + "' belongs to balloons '" +
                                       balloons[it->second].name + "' and '" + b.name + "'");
            }
        }
        for (const auto& v : variables)
            if (!member_of.count(v.name))
                throw InvalidModel("variable '" + v.name + "' belongs to no balloon");
        for (std::size_t i = 0; i < balloons.size(); ++i)
            for (const auto& p : balloons[i].parents) {
                detail::require_vertex(variables, p);
                if (member_of[p] == i)
                    throw InvalidModel("balloon '" + balloons[i].name +
                                       "' lists its own member '" + p + "' as a parent");
            }
        // Balloon-level dependency: A -> B when a member of A parents B.
        std::vector<std::vector<std::size_t>> next(balloons.size());
        for (std::size_t i = 0; i < balloons.size(); ++i)
            for (const auto& p : balloons[i].parents) next[member_of[p]].push_back(i);
        std::vector<int> color(balloons.size(), 0);
        const std::function<bool(std::size_t)> visit = [&](std::size_t u) {
            color[u] = 1;
            for (std::size_t w : next[u]) {
                if (color[w] == 1) return true;
                if (color[w] == 0 && visit(w)) return true;
            }
            color[u] = 2;
            return false;
        };
        for (std::size_t i = 0; i < balloons.size(); ++i)
            if (color[i] == 0 && visit(i))
                throw InvalidModel("balloon dependency cycle through '" + balloons[i].name +
                                   "'");
        BalloonGraph g;
        g.variables = std::move(variables);
        g.balloons = std::move(balloons);
        return g;
    }
};

// ---------------------------------------------------------------------------
// Recursive causal graph: an undirected graph over the exogenous
// variables plus directed arcs that always point at endogenous variables,
// acyclically.

struct RecursiveCausalGraph {
    std::vector<Variable> variables;
    std::set<std::string> exogenous;
    std::vector<std::pair<std::string, std::string>> edges;  // exogenous pairs
    std::vector<std::pair<std::string, std::string>> arcs;   // (parent, endogenous child)

    static RecursiveCausalGraph build(std::vector<Variable> variables,
                                      std::set<std::string> exogenous,
                                      std::vector<std::pair<std::string, std::string>> edges,
                                      std::vector<std::pair<std::string, std::string>> arcs) {
        detail::check_vertices(variables);
        for (const auto& name : exogenous) detail::require_vertex(variables, name);
        std::set<std::pair<std::string, std::string>> canon_edges;
        for (auto& e : edges) {
            detail::require_vertex(variables, e.first);
            detail::require_vertex(variables, e.second);
            if (e.first == e.second)
                throw InvalidModel("self-loop on variable '" + e.first + "'");
            if (!exogenous.count(e.first) || !exogenous.count(e.second))
                throw InvalidModel("edge " + e.first + "-" + e.second +
                                   " joins non-exogenous variables");
            canon_edges.insert(e.first < e.second ? e : std::make_pair(e.second, e.first));
        }
        std::set<std::pair<std::string, std::string>> canon_arcs;
        for (auto& a : arcs) {
            detail::require_vertex(variables, a.first);
            detail::require_vertex(variables, a.second);
            if (a.first == a.second)
                throw InvalidModel("self-loop on variable '" + a.first + "'");
            if (exogenous.count(a.second))
                throw InvalidModel("arc into exogenous variable '" + a.second + "'");
            canon_arcs.insert(a);
        }
        RecursiveCausalGraph g;
        g.variables = std::move(variables);
        g.exogenous = std::move(exogenous);
        g.edges.assign(canon_edges.begin(), canon_edges.end());
        g.arcs.assign(canon_arcs.begin(), canon_arcs.end());
        // The endogenous part must admit an ordering where parents come
        // first; equivalently the arcs between endogenous variables are
        // acyclic.
        std::vector<Variable> endo;
        std::vector<std::pair<std::string, std::string>> endo_arcs;
        for (const auto& v : g.variables)
            if (!g.exogenous.count(v.name)) endo.push_back(v);
        for (const auto& a : g.arcs)
            if (!g.exogenous.count(a.first)) endo_arcs.push_back(a);
        Dag::build(endo, endo_arcs);  // throws on a cycle
        return g;
    }

    std::vector<std::string> parents(const std::string& child) const {
        std::vector<std::string> out;
        for (const auto& v : variables)
            for (const auto& a : arcs)
                if (a.second == child && a.first == v.name) out.push_back(v.name);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Converters into valuation networks.  All produce structure-only nodes;
// tables are attached afterwards (model files) or left absent.

namespace detail {

inline std::string clique_node_name(const std::vector<Variable>& vertices, std::uint64_t m,
                                    const std::vector<std::string>& taken) {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (m >> i & 1) parts.push_back(vertices[i].name);
    std::string name = join(parts, "_");
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "~";
    return name;
}

inline Domain clique_domain(const std::vector<Variable>& vertices, std::uint64_t m) {
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (m >> i & 1) vars.push_back(vertices[i]);
    return Domain(std::move(vars));
}

}  // namespace detail

// One plain node per maximal clique.
inline ValuationNetwork from_ug(const UndirectedGraph& g, Algebra kind = Algebra::probability) {
    std::vector<ValuationNode> nodes;
    std::vector<std::string> taken;
    for (std::uint64_t clique : detail::maximal_cliques(g.vertices.size(), g.adjacency())) {
        ValuationNode n;
        n.name = detail::clique_node_name(g.vertices, clique, taken);
        taken.push_back(n.name);
        n.domain = detail::clique_domain(g.vertices, clique);
        nodes.push_back(std::move(n));
    }
    return ValuationNetwork::build(kind, g.vertices, std::move(nodes));
}

// One conditional node per vertex: head {X}, tail parents(X).  The node
// domain lists the head first, then the parents in declaration order.
inline ValuationNetwork from_dag(const Dag& g, Algebra kind = Algebra::probability) {
    std::vector<ValuationNode> nodes;
    for (const auto& v : g.vertices) {
        ValuationNode n;
        n.name = v.name;
        std::vector<Variable> dom{v};
        for (const auto& p : g.parents(v.name))
            dom.push_back(g.vertices[static_cast<std::size_t>(detail::index_of(g.vertices, p))]);
        n.domain = Domain(std::move(dom));
        n.head = Domain{v};
        nodes.push_back(std::move(n));
    }
    return ValuationNetwork::build(kind, g.vertices, std::move(nodes));
}

// One conditional node per balloon: head = members, tail = parents.
inline ValuationNetwork from_dbg(const BalloonGraph& g, Algebra kind = Algebra::probability) {
    std::vector<ValuationNode> nodes;
    for (const auto& b : g.balloons) {
        ValuationNode n;
        n.name = b.name;
        std::vector<Variable> dom, head;
        for (const auto& m : b.members) {
            const auto& v =
                g.variables[static_cast<std::size_t>(detail::index_of(g.variables, m))];
            dom.push_back(v);
            head.push_back(v);
        }
        for (const auto& p : b.parents)
            dom.push_back(
                g.variables[static_cast<std::size_t>(detail::index_of(g.variables, p))]);
        n.domain = Domain(std::move(dom));
        n.head = Domain(std::move(head));
        nodes.push_back(std::move(n));
    }
    return ValuationNetwork::build(kind, g.variables, std::move(nodes));
}

// Plain nodes for the maximal cliques of the exogenous subgraph, plus a
// conditional node per endogenous variable.
inline ValuationNetwork from_rcg(const RecursiveCausalGraph& g,
                                 Algebra kind = Algebra::probability) {
    std::vector<Variable> exo_vertices;
    for (const auto& v : g.variables)
        if (g.exogenous.count(v.name)) exo_vertices.push_back(v);
    const UndirectedGraph exo_graph = UndirectedGraph::build(exo_vertices, g.edges);

    std::vector<ValuationNode> nodes;
    std::vector<std::string> taken;
    for (std::uint64_t clique :
         detail::maximal_cliques(exo_vertices.size(), exo_graph.adjacency())) {
        ValuationNode n;
        n.name = detail::clique_node_name(exo_vertices, clique, taken);
        taken.push_back(n.name);
        n.domain = detail::clique_domain(exo_vertices, clique);
        nodes.push_back(std::move(n));
    }
    for (const auto& v : g.variables) {
        if (g.exogenous.count(v.name)) continue;
        ValuationNode n;
        n.name = v.name;
        std::vector<Variable> dom{v};
        for (const auto& p : g.parents(v.name))
            dom.push_back(
                g.variables[static_cast<std::size_t>(detail::index_of(g.variables, p))]);
        n.domain = Domain(std::move(dom));
        n.head = Domain{v};
        nodes.push_back(std::move(n));
    }
    return ValuationNetwork::build(kind, g.variables, std::move(nodes));
}

// ---------------------------------------------------------------------------
// DAG separation oracles

namespace detail {

struct DagIndex {
    std::vector<std::vector<int>> parents, children;
    std::map<std::string, int> index;

    explicit DagIndex(const Dag& g) {
        parents.resize(g.vertices.size());
        children.resize(g.vertices.size());
        for (std::size_t i = 0; i < g.vertices.size(); ++i)
            index[g.vertices[i].name] = static_cast<int>(i);
        for (const auto& a : g.arcs) {
            const int p = index.at(a.first), c = index.at(a.second);
            parents[static_cast<std::size_t>(c)].push_back(p);
            children[static_cast<std::size_t>(p)].push_back(c);
        }
    }

    std::vector<bool> set_of(const Dag& g, const VarSet& names) const {
        std::vector<bool> out(g.vertices.size(), false);
        for (const auto& n : names) {
            auto it = index.find(n);
            if (it == index.end()) throw DomainError("unknown variable '" + n + "'");
            out[static_cast<std::size_t>(it->second)] = true;
        }
        return out;
    }
};

inline void check_disjoint(const VarSet& a, const VarSet& b, const VarSet& c) {
    for (const auto& n : a)
        if (b.count(n) || c.count(n))
            throw DomainError("variable '" + n + "' appears in two query sets");
    for (const auto& n : b)
        if (c.count(n)) throw DomainError("variable '" + n + "' appears in two query sets");
}

}  // namespace detail

// d-separation: a is d-separated from b by c when no path is active
// given c — every non-collider on an active path avoids c and every
// collider is in c or has a descendant in c.  Implemented as the usual
// reachability sweep over (vertex, approach-direction) states.
inline bool d_separated(const Dag& g, const VarSet& a, const VarSet& b, const VarSet& c) {
    detail::check_disjoint(a, b, c);
    const detail::DagIndex ix(g);
    const auto in_a = ix.set_of(g, a), in_b = ix.set_of(g, b), in_c = ix.set_of(g, c);
    const std::size_t n = g.vertices.size();

    // Vertices with a descendant in c (or in c themselves): ancestors of c.
    std::vector<bool> anchored(n, false);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (in_c[i]) {
            anchored[i] = true;
            queue.push_back(static_cast<int>(i));
        }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : ix.parents[static_cast<std::size_t>(v)])
            if (!anchored[static_cast<std::size_t>(p)]) {
                anchored[static_cast<std::size_t>(p)] = true;
                queue.push_back(p);
            }
    }

    // State (vertex, direction): arrived moving up (towards parents) or
    // down (towards children).
    std::vector<bool> seen_up(n, false), seen_down(n, false);
    std::deque<std::pair<int, bool>> frontier;  // (vertex, moving_up)
    for (std::size_t i = 0; i < n; ++i)
        if (in_a[i]) frontier.emplace_back(static_cast<int>(i), true);
    while (!frontier.empty()) {
        const auto [v, up] = frontier.front();
        frontier.pop_front();
        auto& seen = up ? seen_up : seen_down;
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = true;
        if (in_b[static_cast<std::size_t>(v)]) return false;
        if (up) {
            // Arrived from a child (or a start vertex): v is a
            // non-collider towards both parents and children.
            if (!in_c[static_cast<std::size_t>(v)]) {
                for (int p : ix.parents[static_cast<std::size_t>(v)])
                    frontier.emplace_back(p, true);
                for (int ch : ix.children[static_cast<std::size_t>(v)])
                    frontier.emplace_back(ch, false);
            }
        } else {
            // Arrived from a parent: continuing down keeps v a
            // non-collider; turning up makes it a collider.
            if (!in_c[static_cast<std::size_t>(v)]) {
                for (int ch : ix.children[static_cast<std::size_t>(v)])
                    frontier.emplace_back(ch, false);
            }
            if (anchored[static_cast<std::size_t>(v)]) {
                for (int p : ix.parents[static_cast<std::size_t>(v)])
                    frontier.emplace_back(p, true);
            }
        }
    }
    return true;
}

// Moralization criterion: restrict to the ancestral set of a ∪ b ∪ c,
// marry co-parents, drop directions, delete c, and test plain vertex
// separation.  Independent of d_separated by construction.
inline bool moral_separated(const Dag& g, const VarSet& a, const VarSet& b, const VarSet& c) {
    detail::check_disjoint(a, b, c);
    const detail::DagIndex ix(g);
    const auto in_a = ix.set_of(g, a), in_b = ix.set_of(g, b), in_c = ix.set_of(g, c);
    const std::size_t n = g.vertices.size();

    std::vector<bool> ancestral(n, false);
    std::deque<int> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (in_a[i] || in_b[i] || in_c[i]) {
            ancestral[i] = true;
            queue.push_back(static_cast<int>(i));
        }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int p : ix.parents[static_cast<std::size_t>(v)])
            if (!ancestral[static_cast<std::size_t>(p)]) {
                ancestral[static_cast<std::size_t>(p)] = true;
                queue.push_back(p);
            }
    }

    std::vector<std::set<int>> adj(n);
    const auto connect = [&](int u, int v) {
        adj[static_cast<std::size_t>(u)].insert(v);
        adj[static_cast<std::size_t>(v)].insert(u);
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (!ancestral[v]) continue;
        const auto& ps = ix.parents[v];
        for (int p : ps) connect(p, static_cast<int>(v));
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) connect(ps[i], ps[j]);
    }

    std::vector<bool> reach(n, false);
    for (std::size_t i = 0; i < n; ++i)
        if (in_a[i]) {
            reach[i] = true;
            queue.push_back(static_cast<int>(i));
        }
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (in_c[static_cast<std::size_t>(w)] || reach[static_cast<std::size_t>(w)])
                continue;
            reach[static_cast<std::size_t>(w)] = true;
            queue.push_back(w);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (in_b[i] && reach[i]) return false;
    return true;
}

}  // namespace valnet
