#pragma once

// Variable elimination by fusion.  Fusing a network with respect to Y
// combines every node whose domain contains Y into one node and
// marginalizes Y out of it; all other nodes are untouched.
//
// Head bookkeeping: when every combined node is a conditional, their
// heads are pairwise disjoint, and the head->tail dependency between them
// is acyclic, the combined node is a conditional with head = union of
// heads and tail = union of domains minus that; otherwise it is plain.
// Marginalizing the fused variable out of a head shrinks the head; a head
// that empties leaves an identity node, which is dropped.  Marginalizing
// a tail variable of a conditional demotes the node to plain, since the
// result is no longer normalized per tail configuration.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "network.hpp"

namespace valnet {

struct FuseOptions {
    // Identity nodes (conditionals whose head emptied) are normally
    // removed.  Tests can keep them to confirm the drop is harmless.
    bool drop_identities = true;
};

struct FusionStep {
    std::string variable;
    std::vector<std::string> combined;  // node names, in node order
    std::vector<std::string> domain;    // fused node domain after marginalizing, sorted
    std::vector<std::string> head;      // fused node head, sorted
    bool dropped = false;

    std::string to_line() const {
        std::ostringstream out;
        out << "fuse " << variable << ": combine " << detail::braced(combined)
            << " -> domain " << detail::braced(domain) << " head " << detail::braced(head);
        if (dropped) out << " dropped";
        return out.str();
    }
};

// Audit log of an elimination run, one step per fused variable.
struct FusionTrace {
    std::vector<FusionStep> steps;

    std::string to_text() const {
        std::string out;
        for (const auto& s : steps) {
            out += s.to_line();
            out += '\n';
        }
        return out;
    }
};

using EliminationOrder = std::vector<std::string>;

namespace detail {

// Index-space twin of a ValuationNetwork: variables become bit positions
// in declaration order, domains and heads become masks.  All fusion
// bookkeeping happens here; tables ride along only when needed.
struct IndexNet {
    Algebra kind = Algebra::probability;
    std::vector<Variable> vars;  // full declaration list; bit i = vars[i]
    std::uint64_t alive = 0;

    struct Node {
        std::string name;
        std::uint64_t dom = 0, head = 0;
        std::optional<Valuation> table;
    };
    std::vector<Node> nodes;

    static IndexNet of(const ValuationNetwork& net, bool keep_tables) {
        IndexNet in;
        in.kind = net.kind();
        in.vars = net.variables();
        if (in.vars.size() > 64)
            throw InvalidModel("networks with more than 64 variables are not supported");
        in.alive = in.vars.size() == 64 ? ~std::uint64_t(0)
                                        : (std::uint64_t(1) << in.vars.size()) - 1;
        for (const auto& n : net.nodes()) {
            Node node;
            node.name = n.name;
            node.dom = net.mask_of(n.domain.names());
            node.head = net.mask_of(n.head.names());
            if (keep_tables && n.table) node.table = n.table;
            in.nodes.push_back(std::move(node));
        }
        return in;
    }

    int var_index(const std::string& name) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i].name == name && (alive >> i & 1)) return static_cast<int>(i);
        return -1;
    }

    // Mask -> Domain in declaration order.
    Domain domain_from(std::uint64_t m) const {
        std::vector<Variable> out;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (m >> i & 1) out.push_back(vars[i]);
        return Domain(std::move(out));
    }

    std::vector<std::string> names_from(std::uint64_t m) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (m >> i & 1) out.push_back(vars[i].name);
        std::sort(out.begin(), out.end());
        return out;
    }

    bool name_taken(const std::string& name) const {
        for (const auto& n : nodes)
            if (n.name == name) return true;
        return false;
    }

    // Head->tail dependency among `members` must be acyclic: node i feeds
    // node j when a head variable of i lies in the tail of j.
    template <class MemberNode>
    static bool dep_acyclic(const std::vector<MemberNode>& members) {
        const std::size_t n = members.size();
        std::vector<int> color(n, 0);
        std::vector<std::vector<std::size_t>> next(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && (members[i].head & (members[j].dom & ~members[j].head)))
                    next[i].push_back(j);
        for (std::size_t i = 0; i < n; ++i)
            if (color[i] == 0 && dep_cycle(i, next, color)) return false;
        return true;
    }

    static bool dep_cycle(std::size_t i, const std::vector<std::vector<std::size_t>>& next,
                          std::vector<int>& color) {
        color[i] = 1;
        for (std::size_t j : next[i]) {
            if (color[j] == 1) return true;
            if (color[j] == 0 && dep_cycle(j, next, color)) return true;
        }
        color[i] = 2;
        return false;
    }

    void fuse(int y, FusionTrace* trace, const FuseOptions& opts) {
        const std::uint64_t ybit = std::uint64_t(1) << y;
        std::vector<Node> combined, rest;
        for (auto& n : nodes)
            (n.dom & ybit ? combined : rest).push_back(std::move(n));
        nodes = std::move(rest);
        alive &= ~ybit;

        FusionStep step;
        step.variable = vars[static_cast<std::size_t>(y)].name;
        for (const auto& n : combined) step.combined.push_back(n.name);

        if (combined.empty()) {
            if (trace) trace->steps.push_back(std::move(step));
            return;
        }

        std::uint64_t dom = 0, heads = 0;
        bool all_cond = true, heads_disjoint = true;
        for (const auto& n : combined) {
            dom |= n.dom;
            if (!n.head) all_cond = false;
            if (heads & n.head) heads_disjoint = false;
            heads |= n.head;
        }
        std::uint64_t head = 0;
        if (all_cond && heads_disjoint && dep_acyclic(combined)) head = heads;

        // Combine tables (only possible when every member carries one),
        // then marginalize the fused variable out.
        std::optional<Valuation> table;
        bool all_tabled = true;
        for (const auto& n : combined)
            if (!n.table) all_tabled = false;
        if (all_tabled) {
            Valuation acc = *combined.front().table;
            for (std::size_t i = 1; i < combined.size(); ++i)
                acc = combine(acc, *combined[i].table);
            table = std::move(acc);
        }

        const std::uint64_t newdom = dom & ~ybit;
        bool dropped = false;
        if (head) {
            if (head & ybit) {
                head &= ~ybit;
                if (!head) dropped = true;  // identity over the tail
            } else {
                head = 0;  // fused out a tail variable: demote to plain
            }
        }

        step.domain = names_from(newdom);
        step.head = names_from(head);

        if (dropped && opts.drop_identities) {
            step.dropped = true;
            if (trace) trace->steps.push_back(std::move(step));
            return;
        }

        Node fused;
        fused.dom = newdom;
        fused.head = head;
        if (table) fused.table = marginalize(*table, table->domain().minus({step.variable}));
        std::string name = "f_" + step.variable;
        while (name_taken(name)) name += "_";
        fused.name = std::move(name);
        nodes.push_back(std::move(fused));
        if (trace) trace->steps.push_back(std::move(step));
    }

    // Variables outside `keep`, eliminated greedily: each step picks the
    // variable contained in the fewest live nodes (ties by name), then
    // simulates the structural effect of fusing it — merge, head rule,
    // identity drop — before recomputing degrees.  Re-ranking after every
    // step matters for soundness-preserving order quality: branches whose
    // heads empty out (degree-1 conditionals) are dropped before any merge
    // can entangle their tails with the rest of the network.
    std::vector<int> pick_order(std::uint64_t keep) const {
        struct SimNode {
            std::uint64_t dom = 0, head = 0;
        };
        std::vector<SimNode> sim;
        sim.reserve(nodes.size());
        for (const auto& n : nodes) sim.push_back({n.dom, n.head});
        std::uint64_t live = alive;

        std::vector<int> out;
        for (;;) {
            int best = -1, best_deg = 0;
            for (std::size_t i = 0; i < vars.size(); ++i) {
                if (!(live >> i & 1) || (keep >> i & 1)) continue;
                int deg = 0;
                for (const auto& n : sim)
                    if (n.dom >> i & 1) ++deg;
                if (best < 0 || deg < best_deg ||
                    (deg == best_deg && vars[i].name < vars[static_cast<std::size_t>(best)].name)) {
                    best = static_cast<int>(i);
                    best_deg = deg;
                }
            }
            if (best < 0) break;
            out.push_back(best);
            const std::uint64_t ybit = std::uint64_t(1) << best;
            live &= ~ybit;

            std::vector<SimNode> combined, rest;
            for (const auto& n : sim) (n.dom & ybit ? combined : rest).push_back(n);
            if (combined.empty()) continue;

            std::uint64_t dom = 0, heads = 0;
            bool all_cond = true, heads_disjoint = true;
            for (const auto& n : combined) {
                dom |= n.dom;
                if (!n.head) all_cond = false;
                if (heads & n.head) heads_disjoint = false;
                heads |= n.head;
            }
            std::uint64_t head = 0;
            if (all_cond && heads_disjoint && dep_acyclic(combined)) head = heads;
            if (head) {
                if (head & ybit) {
                    head &= ~ybit;
                    if (!head) {  // identity over the tail: node disappears
                        sim = std::move(rest);
                        continue;
                    }
                } else {
                    head = 0;  // fused out a tail variable: demote to plain
                }
            }
            rest.push_back({dom & ~ybit, head});
            sim = std::move(rest);
        }
        return out;
    }

    bool separated(std::uint64_t r, std::uint64_t s, std::uint64_t v) const {
        std::uint64_t reach = r;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& n : nodes) {
                const std::uint64_t dm = n.dom & ~v;
                if ((dm & reach) && (dm & ~reach & alive)) {
                    reach |= dm;
                    grew = true;
                }
            }
        }
        return (reach & s) == 0;
    }

    ValuationNetwork to_network() const {
        std::vector<Variable> live;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (alive >> i & 1) live.push_back(vars[i]);
        std::vector<ValuationNode> out;
        for (const auto& n : nodes) {
            ValuationNode node;
            node.name = n.name;
            // Preserve the table's own layout when present so numeric
            // results stay bit-stable; fall back to declaration order.
            node.domain = n.table ? n.table->domain() : domain_from(n.dom);
            node.head = node.domain.intersect(names_from_set(n.head));
            node.table = n.table;
            out.push_back(std::move(node));
        }
        return ValuationNetwork::build(kind, std::move(live), std::move(out));
    }

    VarSet names_from_set(std::uint64_t m) const {
        VarSet out;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (m >> i & 1) out.insert(vars[i].name);
        return out;
    }
};

}  // namespace detail

// Fuse a single variable out of the network.  The variable must exist; a
// variable contained in no node is simply removed from the variable set.
inline ValuationNetwork fuse_var(const ValuationNetwork& net, const std::string& variable,
                                 FusionTrace* trace = nullptr, const FuseOptions& opts = {}) {
    auto in = detail::IndexNet::of(net, true);
    int y = in.var_index(variable);
    if (y < 0) throw DomainError("unknown variable '" + variable + "'");
    in.fuse(y, trace, opts);
    return in.to_network();
}

struct EliminationResult {
    ValuationNetwork network;
    FusionTrace trace;
};

// Fuse the listed variables in order.  Each must name a distinct variable
// of the network.
inline EliminationResult eliminate(const ValuationNetwork& net, const EliminationOrder& order,
                                   const FuseOptions& opts = {}) {
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (order[i] == order[j])
                throw DomainError("variable '" + order[i] +
                                  "' listed twice in the elimination order");
    auto in = detail::IndexNet::of(net, true);
    EliminationResult result;
    for (const auto& name : order) {
        int y = in.var_index(name);
        if (y < 0) throw DomainError("unknown variable '" + name + "'");
        in.fuse(y, &result.trace, opts);
    }
    result.network = in.to_network();
    return result;
}

// Deterministic elimination order for all variables outside `keep`:
// ascending degree in the node-variable graph, ties broken by name.
inline EliminationOrder pick_order(const ValuationNetwork& net, const VarSet& keep) {
    auto in = detail::IndexNet::of(net, false);
    for (const auto& name : keep)
        if (!net.has_variable(name)) throw DomainError("unknown variable '" + name + "'");
    EliminationOrder out;
    for (int i : in.pick_order(net.mask_of(keep)))
        out.push_back(in.vars[static_cast<std::size_t>(i)].name);
    return out;
}

// Marginal of the network's joint over `target`, computed by fusion.
// Equals joint() marginalized to `target`, without ever materializing a
// table larger than the fusion steps require.  The result domain is the
// target in declaration order.
inline Valuation marginal(const ValuationNetwork& net, const VarSet& target,
                          FusionTrace* trace = nullptr, const FuseOptions& opts = {}) {
    if (!net.fully_tabled())
        throw InvalidModel("node '" + net.first_untabled() + "' has no table");
    const Domain target_domain = net.domain_of(target);
    auto in = detail::IndexNet::of(net, true);
    for (int y : in.pick_order(net.mask_of(target))) in.fuse(y, trace, opts);
    Valuation acc = Valuation::identity(net.kind(), Domain{});
    for (const auto& n : in.nodes) acc = combine(acc, *n.table);
    acc = combine(acc, Valuation::identity(net.kind(), target_domain));
    return marginalize(acc, target_domain);
}

}  // namespace valnet
