#pragma once

// Seeded random model generators.  All randomness flows through a
// splitmix64 stream so a seed fully determines the output byte-for-byte,
// independent of platform and standard-library version.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "model_io.hpp"

namespace valnet {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with exactly 53 random bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    bool chance(double p) { return u01() < p; }

private:
    std::uint64_t state_;
};

namespace detail {

// A table over `dom` that is proper for its head: positive entries, and
// per tail configuration the head sums to 1 (probability), has minimum
// rank 0 (kappa), or has maximum 1 (possibility).  Empty head: raw
// positive entries (kappa: small nonnegative integers).
inline std::vector<double> random_table(Rng& rng, Algebra kind, const Domain& dom,
                                        const Domain& head) {
    std::vector<double> v(dom.table_size());
    for (auto& x : v)
        x = kind == Algebra::kappa ? static_cast<double>(rng.below(6)) : 0.1 + 0.9 * rng.u01();
    if (head.empty()) return v;

    const Domain tail = dom.minus(head.names());
    const auto st = embedding_strides(tail, dom);
    std::vector<double> agg(tail.table_size(),
                            kind == Algebra::probability ? 0.0
                            : kind == Algebra::kappa     ? kInf
                                                         : -kInf);
    for_each_config(dom, [&](std::size_t k, const std::vector<int>& digits) {
        const std::size_t t = dot(digits, st);
        switch (kind) {
            case Algebra::probability: agg[t] += v[k]; break;
            case Algebra::kappa: agg[t] = std::min(agg[t], v[k]); break;
            case Algebra::possibility: agg[t] = std::max(agg[t], v[k]); break;
        }
    });
    for_each_config(dom, [&](std::size_t k, const std::vector<int>& digits) {
        const std::size_t t = dot(digits, st);
        switch (kind) {
            case Algebra::probability: v[k] /= agg[t]; break;
            case Algebra::kappa: v[k] -= agg[t]; break;
            case Algebra::possibility: v[k] /= agg[t]; break;
        }
    });
    return v;
}

inline ValuationNetwork with_random_tables(const ValuationNetwork& net, Rng& rng) {
    std::vector<ValuationNode> nodes = net.nodes();
    for (auto& n : nodes)
        n.table = Valuation(net.kind(), n.domain, random_table(rng, net.kind(), n.domain, n.head));
    return ValuationNetwork::build(net.kind(), net.variables(), std::move(nodes));
}

inline std::vector<Variable> numbered_variables(Rng& rng, int count, int max_frame) {
    std::vector<Variable> vars;
    for (int i = 1; i <= count; ++i) {
        const int frame = max_frame > 2 && rng.below(3) == 0 ? 3 : 2;
        vars.push_back(Variable{"X" + std::to_string(i), frame});
    }
    return vars;
}

}  // namespace detail

// Random DAG model: arc i->j (i<j) with probability 0.4, at most three
// parents per vertex; one proper conditional per vertex when tabled.
inline ModelFile random_dag_model(int vars, std::uint64_t seed,
                                  Algebra kind = Algebra::probability,
                                  bool with_tables = true, int max_frame = 3) {
    Rng rng(seed);
    auto vertices = detail::numbered_variables(rng, vars, max_frame);
    std::vector<std::pair<std::string, std::string>> arcs;
    for (int j = 1; j < vars; ++j) {
        int parents = 0;
        for (int i = 0; i < j && parents < 3; ++i)
            if (rng.chance(0.4)) {
                arcs.emplace_back(vertices[static_cast<std::size_t>(i)].name,
                                  vertices[static_cast<std::size_t>(j)].name);
                ++parents;
            }
    }
    ModelFile m;
    m.type = ModelType::dag;
    m.dag = Dag::build(vertices, std::move(arcs));
    m.network = from_dag(*m.dag, kind);
    if (with_tables) m.network = detail::with_random_tables(m.network, rng);
    return m;
}

// Random undirected model: each edge present with probability 0.4; one
// plain node per maximal clique when tabled.
inline ModelFile random_ug_model(int vars, std::uint64_t seed,
                                 Algebra kind = Algebra::probability,
                                 bool with_tables = true, int max_frame = 3) {
    Rng rng(seed);
    auto vertices = detail::numbered_variables(rng, vars, max_frame);
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < vars; ++i)
        for (int j = i + 1; j < vars; ++j)
            if (rng.chance(0.4))
                edges.emplace_back(vertices[static_cast<std::size_t>(i)].name,
                                   vertices[static_cast<std::size_t>(j)].name);
    ModelFile m;
    m.type = ModelType::ug;
    m.ug = UndirectedGraph::build(vertices, std::move(edges));
    m.network = from_ug(*m.ug, kind);
    if (with_tables) m.network = detail::with_random_tables(m.network, rng);
    return m;
}

// Random valuation network over binary variables: either a conditional
// system derived from a random DAG with about a third of the nodes
// demoted to plain, or a plain covering hypergraph.  Node count equals
// the variable count; tables (when requested) are strictly positive and
// proper for their heads.
inline ModelFile random_vn_model(int vars, std::uint64_t seed,
                                 Algebra kind = Algebra::probability,
                                 bool with_tables = true) {
    Rng rng(seed);
    auto vertices = detail::numbered_variables(rng, vars, 2);
    std::vector<ValuationNode> nodes;
    if (rng.chance(0.5)) {
        // DAG-derived conditionals, some demoted to plain.
        std::vector<std::pair<std::string, std::string>> arcs;
        for (int j = 1; j < vars; ++j) {
            int parents = 0;
            for (int i = 0; i < j && parents < 3; ++i)
                if (rng.chance(0.4)) {
                    arcs.emplace_back(vertices[static_cast<std::size_t>(i)].name,
                                      vertices[static_cast<std::size_t>(j)].name);
                    ++parents;
                }
        }
        nodes = from_dag(Dag::build(vertices, std::move(arcs)), kind).nodes();
        for (auto& n : nodes)
            if (rng.below(3) == 0) n.head = Domain();
    } else {
        // Plain hypergraph: node i covers variable i plus up to two others.
        for (int i = 0; i < vars; ++i) {
            ValuationNode n;
            n.name = "n" + std::to_string(i + 1);
            std::vector<Variable> dom{vertices[static_cast<std::size_t>(i)]};
            const int extras = rng.below(3);
            for (int e = 0; e < extras; ++e) {
                const auto& cand = vertices[static_cast<std::size_t>(rng.below(vars))];
                bool present = false;
                for (const auto& d : dom) present = present || d.name == cand.name;
                if (!present) dom.push_back(cand);
            }
            n.domain = Domain(std::move(dom));
            nodes.push_back(std::move(n));
        }
    }
    ModelFile m;
    m.type = ModelType::vn;
    m.network = ValuationNetwork::build(kind, vertices, std::move(nodes));
    if (with_tables) m.network = detail::with_random_tables(m.network, rng);
    return m;
}

inline ModelFile random_model(ModelType type, int vars, std::uint64_t seed,
                              Algebra kind = Algebra::probability, bool with_tables = true) {
    switch (type) {
        case ModelType::dag: return random_dag_model(vars, seed, kind, with_tables);
        case ModelType::ug: return random_ug_model(vars, seed, kind, with_tables);
        case ModelType::vn: return random_vn_model(vars, seed, kind, with_tables);
        default:
            throw UnsupportedOperation("random generation supports vn, ug, and dag models");
    }
}

// A single joint valuation for algebraic test suites: strictly positive
// and normalized (probability), finite with minimum rank 0 (kappa), or
// positive with maximum 1 (possibility).
inline Valuation random_joint(int vars, std::uint64_t seed,
                              Algebra kind = Algebra::probability, int max_frame = 3) {
    Rng rng(seed);
    const Domain dom(detail::numbered_variables(rng, vars, max_frame));
    std::vector<double> v = detail::random_table(rng, kind, dom, dom);
    return Valuation(kind, dom, std::move(v));
}

}  // namespace valnet
