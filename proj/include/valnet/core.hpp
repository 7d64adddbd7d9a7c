#pragma once

// Core vocabulary shared by every other header: the three supported
// uncertainty calculi, error types, variables with finite frames, and
// ordered variable domains that define dense table layouts.

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace valnet {

// Which calculus a valuation lives in.  The table operations differ per
// kind but share one dense representation.
enum class Algebra { probability, kappa, possibility };

inline std::string to_string(Algebra k) {
    switch (k) {
        case Algebra::probability: return "probability";
        case Algebra::kappa: return "kappa";
        case Algebra::possibility: return "possibility";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two valuations from different calculi were mixed.
class AlgebraMismatch : public Error {
public:
    using Error::Error;
};

// A domain precondition failed: unknown variable, overlap, bad subset, ...
class DomainError : public Error {
public:
    using Error::Error;
};

// The operation does not exist for the given calculus.
class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

// Removal hit an impossible cell: positive mass over a zero marginal
// (probability) or a finite rank over an infinite one (kappa).
class InconsistentRemoval : public Error {
public:
    using Error::Error;
};

// normalize() was asked to rescale a zero valuation.
class CannotNormalize : public Error {
public:
    using Error::Error;
};

// Table values violate the calculus (negative mass, fractional rank, ...).
class InvalidValuation : public Error {
public:
    using Error::Error;
};

// A structural model constraint failed (head conflict, cycle, ...).
class InvalidModel : public Error {
public:
    using Error::Error;
};

// Model text could not be tokenized; carries the 1-based source line.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// ---------------------------------------------------------------------------
// Variables and domains

// A variable with a finite frame of `frame_size` states (indexed 0..n-1).
// Identity is by name; two variables with equal names must agree on the
// frame size wherever they meet.
struct Variable {
    std::string name;
    int frame_size = 2;

    friend bool operator==(const Variable& a, const Variable& b) {
        return a.name == b.name && a.frame_size == b.frame_size;
    }
    friend bool operator!=(const Variable& a, const Variable& b) { return !(a == b); }
};

// Unordered variable-name sets used by the independence / separation API.
using VarSet = std::set<std::string>;

// An ordered set of distinct variables.  Semantically a set; the order
// fixes the dense table layout (row-major, last variable fastest).
class Domain {
public:
    Domain() = default;

    explicit Domain(std::vector<Variable> vars) : vars_(std::move(vars)) {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].frame_size < 1)
                throw DomainError("variable '" + vars_[i].name + "' has frame size " +
                                  std::to_string(vars_[i].frame_size));
            for (std::size_t j = i + 1; j < vars_.size(); ++j)
                if (vars_[i].name == vars_[j].name)
                    throw DomainError("duplicate variable '" + vars_[i].name + "' in domain");
        }
        (void)table_size();  // refuse domains too large to ever table
    }

    Domain(std::initializer_list<Variable> vars) : Domain(std::vector<Variable>(vars)) {}

    std::size_t size() const { return vars_.size(); }
    bool empty() const { return vars_.empty(); }
    const Variable& operator[](std::size_t i) const { return vars_[i]; }
    const std::vector<Variable>& variables() const { return vars_; }

    bool contains(const std::string& name) const { return find(name) >= 0; }

    // Index of `name`, or -1.
    int find(const std::string& name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    // Number of cells in a dense table over this domain.
    std::size_t table_size() const {
        std::size_t n = 1;
        for (const auto& v : vars_) {
            n *= static_cast<std::size_t>(v.frame_size);
            if (n > max_table_cells)
                throw DomainError("table over this domain would exceed " +
                                  std::to_string(max_table_cells) + " cells");
        }
        return n;
    }

    // Row-major strides, last variable fastest.
    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(vars_.size(), 1);
        for (int i = static_cast<int>(vars_.size()) - 2; i >= 0; --i)
            s[i] = s[i + 1] * static_cast<std::size_t>(vars_[i + 1].frame_size);
        return s;
    }

    VarSet names() const {
        VarSet out;
        for (const auto& v : vars_) out.insert(v.name);
        return out;
    }

    // Set-wise comparison: same variables (with agreeing frames) in any order.
    bool same_set(const Domain& other) const {
        if (size() != other.size()) return false;
        for (const auto& v : vars_) {
            int j = other.find(v.name);
            if (j < 0 || other[static_cast<std::size_t>(j)].frame_size != v.frame_size)
                return false;
        }
        return true;
    }

    bool subset_of(const Domain& other) const {
        for (const auto& v : vars_) {
            int j = other.find(v.name);
            if (j < 0) return false;
            if (other[static_cast<std::size_t>(j)].frame_size != v.frame_size)
                throw DomainError("variable '" + v.name + "' has conflicting frame sizes");
        }
        return true;
    }

    bool disjoint_with(const Domain& other) const {
        for (const auto& v : vars_)
            if (other.contains(v.name)) return false;
        return true;
    }

    // Union keeping this domain's order, then unseen variables of `other`
    // in their order.  Frame conflicts are an error.
    Domain unite(const Domain& other) const {
        std::vector<Variable> out = vars_;
        for (const auto& v : other.vars_) {
            int j = find(v.name);
            if (j < 0) {
                out.push_back(v);
            } else if (vars_[static_cast<std::size_t>(j)].frame_size != v.frame_size) {
                throw DomainError("variable '" + v.name + "' has conflicting frame sizes");
            }
        }
        return Domain(std::move(out));
    }

    Domain minus(const VarSet& names) const {
        std::vector<Variable> out;
        for (const auto& v : vars_)
            if (!names.count(v.name)) out.push_back(v);
        return Domain(std::move(out));
    }

    Domain intersect(const VarSet& names) const {
        std::vector<Variable> out;
        for (const auto& v : vars_)
            if (names.count(v.name)) out.push_back(v);
        return Domain(std::move(out));
    }

    // Guard against runaway dense tables; the engine targets desk-scale
    // models, not high-dimensional joints.
    static constexpr std::size_t max_table_cells = std::size_t(1) << 26;

private:
    std::vector<Variable> vars_;
};

namespace detail {

// Visit every configuration of `d` in table order.  `digits` holds the
// current state indices, one per domain position.
template <class F>
inline void for_each_config(const Domain& d, F&& fn) {
    std::vector<int> digits(d.size(), 0);
    const std::size_t n = d.table_size();
    for (std::size_t k = 0; k < n; ++k) {
        fn(k, digits);
        for (int i = static_cast<int>(d.size()) - 1; i >= 0; --i) {
            if (++digits[static_cast<std::size_t>(i)] <
                d[static_cast<std::size_t>(i)].frame_size)
                break;
            digits[static_cast<std::size_t>(i)] = 0;
        }
    }
}

// For each position of `super`, the stride of that variable inside `sub`
// (0 when absent).  Dotting these with a configuration of `super` yields
// the corresponding cell index in `sub`.
inline std::vector<std::size_t> embedding_strides(const Domain& sub, const Domain& super) {
    std::vector<std::size_t> out(super.size(), 0);
    const auto sub_strides = sub.strides();
    for (std::size_t i = 0; i < super.size(); ++i) {
        int j = sub.find(super[i].name);
        if (j >= 0) {
            if (sub[static_cast<std::size_t>(j)].frame_size != super[i].frame_size)
                throw DomainError("variable '" + super[i].name +
                                  "' has conflicting frame sizes");
            out[i] = sub_strides[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

inline std::size_t dot(const std::vector<int>& digits, const std::vector<std::size_t>& strides) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < digits.size(); ++i)
        k += static_cast<std::size_t>(digits[i]) * strides[i];
    return k;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// "{A,B,C}" rendering used by traces and CI report lines.
inline std::string braced(const std::vector<std::string>& parts) {
    return "{" + join(parts, ",") + "}";
}

inline std::string braced(const VarSet& names) {
    return braced(std::vector<std::string>(names.begin(), names.end()));
}

}  // namespace detail

}  // namespace valnet
