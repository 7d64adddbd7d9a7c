#pragma once

// Dense valuations over finite variable domains, with the three calculi:
//
//   kind          combine      marginalize    remove          identity  zero
//   probability   pointwise *  sum            pointwise /     all 1     all 0
//   kappa         pointwise +  min            pointwise -     all 0     all inf
//   possibility   pointwise min  max          (unsupported)   all 1     all 0
//
// Tables are row-major with the last domain variable varying fastest.
// Kappa values are nonnegative integers or infinity, stored exactly in
// doubles; probability and possibility values are nonnegative reals.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace valnet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Valuation {
public:
    Valuation(Algebra kind, Domain domain, std::vector<double> values)
        : kind_(kind), domain_(std::move(domain)), values_(std::move(values)) {
        if (values_.size() != domain_.table_size())
            throw InvalidValuation("table has " + std::to_string(values_.size()) +
                                   " entries, domain needs " +
                                   std::to_string(domain_.table_size()));
        for (double v : values_) {
            if (std::isnan(v) || v < 0)
                throw InvalidValuation("table entries must be nonnegative");
            if (kind_ == Algebra::kappa && !std::isinf(v) && std::floor(v) != v)
                throw InvalidValuation("kappa entries must be integers or inf");
            if (kind_ != Algebra::kappa && std::isinf(v))
                throw InvalidValuation("only kappa entries may be infinite");
        }
    }

    // Neutral element of combination: all-ones (probability, possibility)
    // or all-zeros (kappa).
    static Valuation identity(Algebra kind, const Domain& domain) {
        double fill = (kind == Algebra::kappa) ? 0.0 : 1.0;
        return Valuation(kind, domain, std::vector<double>(domain.table_size(), fill));
    }

    // Absorbing element: all-zeros, or all-inf for kappa.
    static Valuation zero(Algebra kind, const Domain& domain) {
        double fill = (kind == Algebra::kappa) ? kInf : 0.0;
        return Valuation(kind, domain, std::vector<double>(domain.table_size(), fill));
    }

    Algebra kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    const std::vector<double>& values() const { return values_; }

    double at(std::size_t i) const { return values_[i]; }

    bool is_zero() const {
        for (double v : values_) {
            if (kind_ == Algebra::kappa ? !std::isinf(v) : v != 0.0) return false;
        }
        return true;
    }

private:
    Algebra kind_;
    Domain domain_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Combination

inline Valuation combine(const Valuation& a, const Valuation& b) {
    if (a.kind() != b.kind())
        throw AlgebraMismatch(std::string("cannot combine ") + to_string(a.kind()) +
                              " with " + to_string(b.kind()));
    const Domain dom = a.domain().unite(b.domain());
    const auto sa = detail::embedding_strides(a.domain(), dom);
    const auto sb = detail::embedding_strides(b.domain(), dom);
    std::vector<double> out(dom.table_size());
    const Algebra kind = a.kind();
    detail::for_each_config(dom, [&](std::size_t k, const std::vector<int>& digits) {
        const double x = a.at(detail::dot(digits, sa));
        const double y = b.at(detail::dot(digits, sb));
        switch (kind) {
            case Algebra::probability: out[k] = x * y; break;
            case Algebra::kappa: out[k] = x + y; break;  // inf absorbs
            case Algebra::possibility: out[k] = std::min(x, y); break;
        }
    });
    return Valuation(kind, dom, std::move(out));
}

// ---------------------------------------------------------------------------
// Marginalization
//
// The result domain is exactly `target`, in target's order; listing the
// same variables in a new order is a pure layout permutation.

inline Valuation marginalize(const Valuation& a, const Domain& target) {
    if (!target.subset_of(a.domain()))
        throw DomainError("marginalization target is not a subset of the domain");
    double init = 0.0;
    switch (a.kind()) {
        case Algebra::probability: init = 0.0; break;
        case Algebra::kappa: init = kInf; break;
        case Algebra::possibility: init = -kInf; break;
    }
    std::vector<double> out(target.table_size(), init);
    const auto st = detail::embedding_strides(target, a.domain());
    const Algebra kind = a.kind();
    detail::for_each_config(a.domain(), [&](std::size_t k, const std::vector<int>& digits) {
        const std::size_t t = detail::dot(digits, st);
        const double v = a.at(k);
        switch (kind) {
            case Algebra::probability: out[t] += v; break;
            case Algebra::kappa: out[t] = std::min(out[t], v); break;
            case Algebra::possibility: out[t] = std::max(out[t], v); break;
        }
    });
    return Valuation(kind, target, std::move(out));
}

inline Valuation marginalize(const Valuation& a, const VarSet& target) {
    return marginalize(a, a.domain().intersect(target));
}

// ---------------------------------------------------------------------------
// Removal (the partial inverse of combination)
//
// Probability divides with the convention 0/0 = 0; positive mass over a
// zero cell is inconsistent.  Kappa subtracts with inf - inf = 0; a finite
// rank over an infinite one, or a negative difference, is inconsistent.
// Possibility has no removal.

inline Valuation remove(const Valuation& a, const Valuation& b) {
    if (a.kind() != b.kind())
        throw AlgebraMismatch(std::string("cannot remove ") + to_string(b.kind()) +
                              " from " + to_string(a.kind()));
    if (a.kind() == Algebra::possibility)
        throw UnsupportedOperation("possibility has no removal operation");
    if (!b.domain().subset_of(a.domain()))
        throw DomainError("removal operand domain is not a subset");
    const auto sb = detail::embedding_strides(b.domain(), a.domain());
    std::vector<double> out(a.domain().table_size());
    const Algebra kind = a.kind();
    detail::for_each_config(a.domain(), [&](std::size_t k, const std::vector<int>& digits) {
        const double x = a.at(k);
        const double y = b.at(detail::dot(digits, sb));
        if (kind == Algebra::probability) {
            if (y == 0.0) {
                if (x != 0.0)
                    throw InconsistentRemoval("positive mass over a zero marginal");
                out[k] = 0.0;
            } else {
                out[k] = x / y;
            }
        } else {  // kappa
            if (std::isinf(y)) {
                if (!std::isinf(x))
                    throw InconsistentRemoval("finite rank over an infinite one");
                out[k] = 0.0;
            } else if (std::isinf(x)) {
                out[k] = kInf;
            } else {
                if (x < y) throw InconsistentRemoval("removal would produce a negative rank");
                out[k] = x - y;
            }
        }
    });
    return Valuation(kind, a.domain(), std::move(out));
}

// ---------------------------------------------------------------------------
// Normalization
//
// probability: scale so the marginal to the empty domain is 1.
// kappa:       shift so the minimum finite rank is 0.
// possibility: scale so the maximum is 1.

inline Valuation normalize(const Valuation& a) {
    if (a.is_zero()) throw CannotNormalize("cannot normalize a zero valuation");
    std::vector<double> out = a.values();
    switch (a.kind()) {
        case Algebra::probability: {
            double sum = 0.0;
            for (double v : out) sum += v;
            for (double& v : out) v /= sum;
            break;
        }
        case Algebra::kappa: {
            double lo = kInf;
            for (double v : out) lo = std::min(lo, v);
            for (double& v : out)
                if (!std::isinf(v)) v -= lo;
            break;
        }
        case Algebra::possibility: {
            double hi = 0.0;
            for (double v : out) hi = std::max(hi, v);
            for (double& v : out) v /= hi;
            break;
        }
    }
    return Valuation(a.kind(), a.domain(), std::move(out));
}

// ---------------------------------------------------------------------------
// Comparison

// Entry comparison: exact for kappa (and for exactly equal values,
// including matching infinities), relative tolerance otherwise.
inline bool entries_close(double x, double y, double rel_tol) {
    if (x == y) return true;
    if (std::isinf(x) || std::isinf(y)) return false;
    return std::fabs(x - y) <= rel_tol * std::max(std::fabs(x), std::fabs(y));
}

// Same kind, same variable set (any layout), entries within `rel_tol`
// (kappa compares exactly regardless of the tolerance).
inline bool approx_equal(const Valuation& a, const Valuation& b, double rel_tol = 1e-9) {
    if (a.kind() != b.kind()) return false;
    if (!a.domain().same_set(b.domain())) return false;
    if (a.kind() == Algebra::kappa) rel_tol = 0.0;
    const auto sb = detail::embedding_strides(b.domain(), a.domain());
    bool ok = true;
    detail::for_each_config(a.domain(), [&](std::size_t k, const std::vector<int>& digits) {
        if (!entries_close(a.at(k), b.at(detail::dot(digits, sb)), rel_tol)) ok = false;
    });
    return ok;
}

// Largest relative entry deviation between two valuations over the same
// variable set; infinity when an infinite entry mismatches a finite one.
inline double max_deviation(const Valuation& a, const Valuation& b) {
    if (a.kind() != b.kind() || !a.domain().same_set(b.domain())) return kInf;
    const auto sb = detail::embedding_strides(b.domain(), a.domain());
    double worst = 0.0;
    detail::for_each_config(a.domain(), [&](std::size_t k, const std::vector<int>& digits) {
        const double x = a.at(k);
        const double y = b.at(detail::dot(digits, sb));
        if (x == y) return;
        if (std::isinf(x) || std::isinf(y)) {
            worst = kInf;
        } else {
            worst = std::max(worst, std::fabs(x - y) / std::max({std::fabs(x), std::fabs(y), 1e-300}));
        }
    });
    return worst;
}

}  // namespace valnet
