#pragma once

// Conditional-independence machinery: conditionals via removal, the
// structural fuse-then-separate test, the numeric factorization test, the
// conditional-calculus verifier, axiom checking, and CI enumeration.

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fusion.hpp"

namespace valnet {

inline VarSet set_union(const VarSet& a, const VarSet& b) {
    VarSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

// A conditional sigma(head | tail): the valuation for head ∪ tail obtained
// by removing the tail marginal from the (head ∪ tail) marginal.
struct Conditional {
    Valuation valuation;
    Domain head;
    Domain tail;
    std::string source;  // name of the joint it came from, if any
};

inline Conditional conditional_of(const Valuation& sigma, const VarSet& b, const VarSet& a,
                                  const std::string& source = {}) {
    if (sigma.kind() == Algebra::possibility)
        throw UnsupportedOperation("possibility has no conditionals (no removal)");
    for (const auto& name : b)
        if (a.count(name))
            throw DomainError("variable '" + name + "' is in both head and tail");
    for (const auto& set : {&b, &a})
        for (const auto& name : *set)
            if (!sigma.domain().contains(name))
                throw DomainError("unknown variable '" + name + "'");
    const Domain dab = sigma.domain().intersect(set_union(a, b));
    const Domain da = sigma.domain().intersect(a);
    Valuation table = remove(marginalize(sigma, dab), marginalize(sigma, da));
    return Conditional{std::move(table), sigma.domain().intersect(b), da, source};
}

// The Conditional invariant: per tail configuration the head entries sum
// to 1 (probability) or reach a minimum of 0 (kappa).  Configurations
// with a zero (or all-infinite) slice are exempt — they carry no mass.
// Returns the worst deviation over the checked configurations.
inline double conditional_deviation(const Conditional& c) {
    const Valuation agg = marginalize(c.valuation, c.tail);
    double worst = 0.0;
    for (double v : agg.values()) {
        if (c.valuation.kind() == Algebra::probability) {
            if (v == 0.0) continue;  // zero tail-marginal slice
            worst = std::max(worst, std::fabs(v - 1.0));
        } else {
            if (std::isinf(v)) continue;
            worst = std::max(worst, std::fabs(v));
        }
    }
    return worst;
}

inline bool is_proper_conditional(const Conditional& c, double tol = 1e-9) {
    if (c.valuation.kind() == Algebra::kappa) return conditional_deviation(c) == 0.0;
    return conditional_deviation(c) <= tol;
}

// ---------------------------------------------------------------------------
// Structural CI test: eliminate everything outside r ∪ s ∪ v, then ask
// whether v cuts r from s in the bipartite graph that remains.  Sound but
// not complete: "not-derivable" is not a claim of dependence.

inline CIStatement ci_structural(const ValuationNetwork& net, const VarSet& r, const VarSet& s,
                                 const VarSet& v, FusionTrace* trace = nullptr) {
    if (r.empty() || s.empty())
        throw DomainError("ci_structural needs non-empty r and s");
    net.check_disjoint_known(r, s, v);
    auto in = detail::IndexNet::of(net, false);
    const std::uint64_t keep = net.mask_of(r) | net.mask_of(s) | net.mask_of(v);
    const FuseOptions opts;
    for (int y : in.pick_order(keep)) in.fuse(y, trace, opts);
    const bool sep = in.separated(net.mask_of(r), net.mask_of(s), net.mask_of(v));
    return CIStatement{r, s, v, sep ? Verdict::independent : Verdict::not_derivable,
                       Criterion::vn_separation};
}

// ---------------------------------------------------------------------------
// Numeric CI test: does the (r ∪ s ∪ v)-marginal factor into an (r ∪ v)
// piece combined with an (s ∪ v) piece?  Tested pointwise:
//   probability:  p(rsv) * p(v) = p(rv) * p(sv)   (within rel_tol)
//   kappa:        k(rsv) + k(v) = k(rv) + k(sv)   (exactly, in extended
//                 arithmetic; configurations with k(v) = inf are vacuous)

inline CIStatement ci_numeric(const Valuation& tau, const VarSet& r, const VarSet& s,
                              const VarSet& v, double rel_tol = 1e-9) {
    if (tau.kind() == Algebra::possibility)
        throw UnsupportedOperation("numeric CI test is undefined for possibility");
    for (const auto& name : r)
        if (s.count(name) || v.count(name))
            throw DomainError("variable '" + name + "' appears in two query sets");
    for (const auto& name : s)
        if (v.count(name))
            throw DomainError("variable '" + name + "' appears in two query sets");
    for (const auto& set : {&r, &s, &v})
        for (const auto& name : *set)
            if (!tau.domain().contains(name))
                throw DomainError("unknown variable '" + name + "'");

    const Domain drsv = tau.domain().intersect(set_union(set_union(r, s), v));
    const Valuation trsv = marginalize(tau, drsv);
    const Valuation tv = marginalize(trsv, drsv.intersect(v));
    const Valuation trv = marginalize(trsv, drsv.intersect(set_union(r, v)));
    const Valuation tsv = marginalize(trsv, drsv.intersect(set_union(s, v)));
    const auto sv = detail::embedding_strides(tv.domain(), drsv);
    const auto srv = detail::embedding_strides(trv.domain(), drsv);
    const auto ssv = detail::embedding_strides(tsv.domain(), drsv);

    bool independent = true;
    detail::for_each_config(drsv, [&](std::size_t k, const std::vector<int>& digits) {
        if (!independent) return;
        const double xv = tv.at(detail::dot(digits, sv));
        const double xrv = trv.at(detail::dot(digits, srv));
        const double xsv = tsv.at(detail::dot(digits, ssv));
        if (tau.kind() == Algebra::probability) {
            if (!entries_close(trsv.at(k) * xv, xrv * xsv, rel_tol)) independent = false;
        } else {
            if (std::isinf(xv)) return;  // impossible context: vacuous
            if (trsv.at(k) + xv != xrv + xsv) independent = false;
        }
    });
    return CIStatement{r, s, v, independent ? Verdict::independent : Verdict::not_derivable,
                       Criterion::numeric};
}

// ---------------------------------------------------------------------------
// Conditional-calculus verifier: checks the seven conditional identities
// on a concrete valuation.  The input is normalized first — the identities
// presuppose a normal valuation (sigma(a) = sigma marginalized to a only
// holds when the empty marginal is the identity scalar).

struct TheoremCheck {
    std::string statement;
    bool pass = false;
    double max_dev = 0.0;
};

struct TheoremReport {
    std::vector<TheoremCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline TheoremReport verify_theorem21(const Valuation& sigma_in, const VarSet& a,
                                      const VarSet& b, const VarSet& c, double tol = 1e-9) {
    if (sigma_in.kind() == Algebra::possibility)
        throw UnsupportedOperation("conditional identities need removal; possibility has none");
    for (const auto& name : a)
        if (b.count(name) || c.count(name))
            throw DomainError("variable '" + name + "' appears in two sets");
    for (const auto& name : b)
        if (c.count(name))
            throw DomainError("variable '" + name + "' appears in two sets");

    const Valuation sigma = normalize(sigma_in);
    const bool exact = sigma.kind() == Algebra::kappa;
    const auto cond = [&](const VarSet& head, const VarSet& tail) {
        return conditional_of(sigma, head, tail).valuation;
    };
    const auto measure = [&](const std::string& label, const Valuation& lhs,
                             const Valuation& rhs) {
        const double dev = max_deviation(lhs, rhs);
        return TheoremCheck{label, exact ? dev == 0.0 : dev <= tol, dev};
    };

    const VarSet none;
    const VarSet ab = set_union(a, b);
    TheoremReport report;

    // (i) sigma(a) = sigma marginalized to a
    report.checks.push_back(
        measure("(i)", cond(a, none), marginalize(sigma, sigma.domain().intersect(a))));
    // (ii) sigma(a) + sigma(b|a) = sigma(a u b)
    report.checks.push_back(
        measure("(ii)", combine(cond(a, none), cond(b, a)), cond(ab, none)));
    // (iii) sigma(b|a) + sigma(c|a u b) = sigma(b u c|a)
    report.checks.push_back(
        measure("(iii)", combine(cond(b, a), cond(c, ab)), cond(set_union(b, c), a)));
    // (iv) sigma(b|a) marginalized to a u b' = sigma(b'|a), for every b' in b
    {
        const Valuation cba = cond(b, a);
        const std::vector<std::string> bvars(b.begin(), b.end());
        TheoremCheck worst{"(iv)", true, 0.0};
        for (std::uint64_t m = 0; m < (std::uint64_t(1) << bvars.size()); ++m) {
            VarSet bp;
            for (std::size_t i = 0; i < bvars.size(); ++i)
                if (m >> i & 1) bp.insert(bvars[i]);
            const Domain target = sigma.domain().intersect(set_union(a, bp));
            const TheoremCheck one = measure("(iv)", marginalize(cba, target), cond(bp, a));
            worst.max_dev = std::max(worst.max_dev, one.max_dev);
            worst.pass = worst.pass && one.pass;
        }
        report.checks.push_back(worst);
    }
    // (v) (sigma(b|a) + sigma(c|a u b)) marginalized to a u c = sigma(c|a)
    report.checks.push_back(
        measure("(v)",
                marginalize(combine(cond(b, a), cond(c, ab)),
                            sigma.domain().intersect(set_union(a, c))),
                cond(c, a)));
    // (vi) sigma(b|a) marginalized to a is an identity for sigma(a)
    {
        const Valuation sa = cond(a, none);
        report.checks.push_back(measure(
            "(vi)",
            combine(marginalize(cond(b, a), sigma.domain().intersect(a)), sa), sa));
    }
    // (vii) sigma(b|a) satisfies the Conditional invariant
    {
        const Conditional cba = conditional_of(sigma, b, a);
        const double dev = conditional_deviation(cba);
        report.checks.push_back(TheoremCheck{"(vii)", exact ? dev == 0.0 : dev <= tol, dev});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Axiom checking for an arbitrary CI criterion over a variable universe.

using CICriterion = std::function<bool(const VarSet&, const VarSet&, const VarSet&)>;

struct AxiomViolation {
    std::string axiom;
    VarSet r, s, w, v;
};

struct SemigraphoidReport {
    std::uint64_t checked = 0;
    std::vector<AxiomViolation> violations;

    bool ok() const { return violations.empty(); }
};

struct SemigraphoidOptions {
    // Also check intersection: r⊥s|(v∪w) ∧ r⊥w|(v∪s) ⇒ r⊥(s∪w)|v.  Only
    // sound for strictly positive joints.
    bool include_intersection = false;
    // Exhaustive enumeration assigns each universe variable to one of
    // {r, s, w, v, unused}; beyond this many assignments, sample instead.
    std::uint64_t max_assignments = 4'000'000;
    std::uint64_t seed = 1;
};

// Checks symmetry, decomposition, weak union, and contraction (plus
// optionally intersection) of `ci` over all disjoint set triples drawn
// from `universe`.  Reports every violated instance with its witness.
inline SemigraphoidReport check_semigraphoid(const CICriterion& ci,
                                             const std::vector<std::string>& universe,
                                             const SemigraphoidOptions& opts = {}) {
    std::map<std::string, bool> memo;
    const auto query = [&](const VarSet& r, const VarSet& s, const VarSet& v) {
        std::string key;
        for (const auto& n : r) key += n + ",";
        key += "|";
        for (const auto& n : s) key += n + ",";
        key += "|";
        for (const auto& n : v) key += n + ",";
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const bool ans = ci(r, s, v);
        memo.emplace(std::move(key), ans);
        return ans;
    };

    SemigraphoidReport report;
    const std::size_t n = universe.size();
    double total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 5;
    const bool exhaustive = total <= static_cast<double>(opts.max_assignments);
    const std::uint64_t rounds =
        exhaustive ? static_cast<std::uint64_t>(total) : opts.max_assignments;

    std::uint64_t rng = opts.seed ? opts.seed : 1;
    const auto next_rng = [&rng]() {
        rng += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = rng;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };

    std::vector<int> assign(n, 0);
    for (std::uint64_t round = 0; round < rounds; ++round) {
        if (exhaustive) {
            std::uint64_t code = round;
            for (std::size_t i = 0; i < n; ++i) {
                assign[i] = static_cast<int>(code % 5);
                code /= 5;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                assign[i] = static_cast<int>(next_rng() % 5);
        }
        VarSet r, s, w, v;
        for (std::size_t i = 0; i < n; ++i) {
            switch (assign[i]) {
                case 0: r.insert(universe[i]); break;
                case 1: s.insert(universe[i]); break;
                case 2: w.insert(universe[i]); break;
                case 3: v.insert(universe[i]); break;
                default: break;
            }
        }
        if (r.empty() || s.empty()) continue;

        if (w.empty()) {
            ++report.checked;
            if (query(r, s, v) && !query(s, r, v))
                report.violations.push_back({"symmetry", r, s, w, v});
            continue;
        }

        const VarSet sw = set_union(s, w);
        const VarSet vs = set_union(v, s);
        const VarSet vw = set_union(v, w);
        ++report.checked;
        if (query(r, sw, v)) {
            if (!query(r, s, v))
                report.violations.push_back({"decomposition", r, s, w, v});
            if (!query(r, s, vw))
                report.violations.push_back({"weak-union", r, s, w, v});
        }
        if (query(r, s, v) && query(r, w, vs) && !query(r, sw, v))
            report.violations.push_back({"contraction", r, s, w, v});
        if (opts.include_intersection && query(r, s, vw) && query(r, w, vs) &&
            !query(r, sw, v))
            report.violations.push_back({"intersection", r, s, w, v});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Enumerate every disjoint triple (r, s, v) with |r|, |s| <= max_set_size
// (v ranges over all remaining subsets) and evaluate ci_structural on
// each, in a deterministic order.

inline std::vector<CIStatement> enumerate_ci(const ValuationNetwork& net, int max_set_size) {
    const std::size_t n = net.variables().size();
    if (n > 20)
        throw InvalidModel("enumerate_ci supports at most 20 variables (got " +
                           std::to_string(n) + ")");
    const auto base = detail::IndexNet::of(net, false);
    const std::uint64_t all = n == 0 ? 0 : (std::uint64_t(1) << n) - 1;
    const FuseOptions opts;

    const auto set_of = [&](std::uint64_t m) {
        VarSet out;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) out.insert(net.variables()[i].name);
        return out;
    };

    std::vector<CIStatement> out;
    for (std::uint64_t r = 1; r <= all; ++r) {
        if (std::popcount(r) > max_set_size) continue;
        for (std::uint64_t s = 1; s <= all; ++s) {
            if ((s & r) || std::popcount(s) > max_set_size) continue;
            const std::uint64_t rest = all & ~(r | s);
            std::uint64_t v = rest;
            while (true) {
                auto in = base;
                const std::uint64_t keep = r | s | v;
                for (int y : in.pick_order(keep)) in.fuse(y, nullptr, opts);
                const bool sep = in.separated(r, s, v);
                out.push_back(CIStatement{set_of(r), set_of(s), set_of(v),
                                          sep ? Verdict::independent : Verdict::not_derivable,
                                          Criterion::vn_separation});
                if (v == 0) break;
                v = (v - 1) & rest;
            }
        }
    }
    return out;
}

}  // namespace valnet
