// Copyright 2026 The IQA-DPLL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary optimization problems as diagonal Pauli-Z Hamiltonians.
//
// Conventions used throughout the library:
//   * spins are +1/-1 with bit value 1 -> +1 and 0 -> -1;
//   * a term is satisfied when it evaluates strictly positive (or to 1 for
//     0/1-valued clauses);
//   * rewarded logical terms enter the Hamiltonian with negative weight, so
//     every solver minimizes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "iqa/error.hpp"

namespace iqa {

using Qubit = std::uint32_t;

struct Literal {
    Qubit variable = 0;
    bool positive = true;

    Literal negated() const { return {variable, !positive}; }

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal pos(Qubit v) { return {v, true}; }
inline Literal neg(Qubit v) { return {v, false}; }

struct Clause {
    std::vector<Literal> literals;
    double weight = 1.0;

    std::size_t size() const { return literals.size(); }
    bool has_duplicate_variable() const {
        for (std::size_t a = 0; a < literals.size(); ++a)
            for (std::size_t b = a + 1; b < literals.size(); ++b)
                if (literals[a].variable == literals[b].variable) return true;
        return false;
    }
};

struct CnfFormula {
    std::size_t num_variables = 0;
    std::vector<Clause> clauses;
    /// (positive-polarity index, negative-polarity index) pairs of a
    /// polarity-split instance; empty for ordinary formulas.
    std::vector<std::pair<Qubit, Qubit>> split_pairs;

    bool is_split() const { return !split_pairs.empty(); }

    void validate() const {
        for (const auto& c : clauses) {
            for (const auto& l : c.literals)
                if (l.variable >= num_variables)
                    throw InvalidArgument("literal variable out of range");
            if (c.weight < 0.0) throw InvalidArgument("negative clause weight");
        }
        std::vector<bool> seen(num_variables, false);
        for (auto [a, b] : split_pairs) {
            if (a >= num_variables || b >= num_variables || a == b || seen[a] || seen[b])
                throw InvalidArgument("split pairs must be disjoint and in range");
            seen[a] = seen[b] = true;
        }
    }
};

/// A single weighted product of Pauli-Z operators. An empty qubit set is a
/// constant.
struct BaseTerm {
    std::vector<Qubit> qubits;  // sorted, distinct
    double coefficient = 0.0;

    friend bool operator==(const BaseTerm&, const BaseTerm&) = default;
};

enum class ValueDomain { PlusMinusOne, ZeroOne };

/// A group of base terms representing one logical structure (an XOR
/// constraint, a SAT clause, a pair penalty). The Hamiltonian contribution of
/// the term is -weight * value.
struct LogicalTerm {
    std::size_t id = 0;
    std::vector<BaseTerm> expansion;
    double weight = 1.0;
    ValueDomain domain = ValueDomain::PlusMinusOne;

    std::vector<Qubit> support() const {
        std::vector<Qubit> s;
        for (const auto& t : expansion) s.insert(s.end(), t.qubits.begin(), t.qubits.end());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }

    bool is_constant() const {
        return std::all_of(expansion.begin(), expansion.end(),
                           [](const BaseTerm& t) { return t.qubits.empty(); });
    }

    double constant_part() const {
        double c = 0.0;
        for (const auto& t : expansion)
            if (t.qubits.empty()) c += t.coefficient;
        return c;
    }
};

class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::size_t n, std::int8_t fill = -1) : values_(n, fill) {}
    explicit Assignment(std::vector<std::int8_t> values) : values_(std::move(values)) {
        for (auto v : values_)
            if (v != 1 && v != -1) throw InvalidArgument("assignment entries must be +1 or -1");
    }
    Assignment(std::initializer_list<int> values) {
        for (int v : values) {
            if (v != 1 && v != -1) throw InvalidArgument("assignment entries must be +1 or -1");
            values_.push_back(static_cast<std::int8_t>(v));
        }
    }

    /// Basis index convention: bit j set <=> spin j is +1.
    static Assignment from_index(std::uint64_t index, std::size_t n) {
        Assignment a(n);
        for (std::size_t j = 0; j < n; ++j) a.values_[j] = ((index >> j) & 1U) ? 1 : -1;
        return a;
    }

    std::uint64_t to_index() const {
        std::uint64_t x = 0;
        for (std::size_t j = 0; j < values_.size(); ++j)
            if (values_[j] > 0) x |= std::uint64_t{1} << j;
        return x;
    }

    std::size_t size() const { return values_.size(); }
    std::int8_t operator[](std::size_t j) const { return values_[j]; }
    void set(std::size_t j, int v) { values_[j] = v > 0 ? 1 : -1; }
    const std::vector<std::int8_t>& values() const { return values_; }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<std::int8_t> values_;
};

namespace detail {

inline constexpr double kZeroCoefficient = 1e-13;

inline double product(const std::vector<Qubit>& qubits, const Assignment& a) {
    int s = 1;
    for (auto q : qubits) s *= a[q];
    return s;
}

/// Merge equal qubit sets and drop vanishing coefficients. Returns the
/// nonconstant terms (sorted by size, then lexicographically) and the
/// accumulated constant.
inline std::pair<std::vector<BaseTerm>, double> merge_terms(std::span<const BaseTerm> terms) {
    std::map<std::vector<Qubit>, double> acc;
    double constant = 0.0;
    for (const auto& t : terms) {
        if (t.qubits.empty())
            constant += t.coefficient;
        else
            acc[t.qubits] += t.coefficient;
    }
    std::vector<BaseTerm> out;
    out.reserve(acc.size());
    for (auto& [q, c] : acc)
        if (std::abs(c) > kZeroCoefficient) out.push_back({q, c});
    std::stable_sort(out.begin(), out.end(), [](const BaseTerm& x, const BaseTerm& y) {
        if (x.qubits.size() != y.qubits.size()) return x.qubits.size() < y.qubits.size();
        return x.qubits < y.qubits;
    });
    return {std::move(out), constant};
}

inline std::vector<BaseTerm> merged_expansion(std::span<const BaseTerm> terms) {
    auto [out, constant] = merge_terms(terms);
    if (std::abs(constant) > kZeroCoefficient || out.empty())
        out.insert(out.begin(), BaseTerm{{}, constant});
    return out;
}

}  // namespace detail

inline double evaluate(const BaseTerm& t, const Assignment& a) {
    return t.coefficient * detail::product(t.qubits, a);
}

inline double evaluate(const LogicalTerm& t, const Assignment& a) {
    double v = 0.0;
    for (const auto& b : t.expansion) {
        for (auto q : b.qubits)
            if (q >= a.size()) throw InvalidArgument("assignment shorter than term support");
        v += evaluate(b, a);
    }
    return v;
}

class CostHamiltonian {
public:
    CostHamiltonian() = default;

    /// H = -sum_a w_a h_a + sum(extra).
    static CostHamiltonian from_logical(std::size_t n, std::vector<LogicalTerm> logical,
                                        std::vector<BaseTerm> extra = {}) {
        CostHamiltonian h;
        h.n_ = n;
        h.logical_ = std::move(logical);
        h.extra_ = std::move(extra);
        h.rebuild();
        return h;
    }

    /// A Hamiltonian with no logical structure.
    static CostHamiltonian from_base(std::size_t n, std::vector<BaseTerm> terms, double offset = 0.0) {
        terms.push_back({{}, offset});
        return from_logical(n, {}, std::move(terms));
    }

    std::size_t num_qubits() const { return n_; }
    const std::vector<BaseTerm>& terms() const { return terms_; }
    double offset() const { return offset_; }
    const std::vector<LogicalTerm>& logical_terms() const { return logical_; }
    const std::vector<BaseTerm>& extra_terms() const { return extra_; }

    const LogicalTerm* find_logical(std::size_t id) const {
        for (const auto& t : logical_)
            if (t.id == id) return &t;
        return nullptr;
    }

    /// Sum of |c_a| over the nonconstant base terms.
    double total_abs_coefficient() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::abs(t.coefficient);
        return s;
    }

    bool is_k_local(std::size_t k) const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [k](const BaseTerm& t) { return t.qubits.size() <= k; });
    }

    CostHamiltonian with_extra(std::span<const BaseTerm> added) const {
        auto extra = extra_;
        extra.insert(extra.end(), added.begin(), added.end());
        return from_logical(n_, logical_, std::move(extra));
    }

    /// Remove logical term `id`; its contribution is replaced by the
    /// constant -w * value. Returns that constant.
    std::pair<CostHamiltonian, double> without_logical(std::size_t id) const {
        auto logical = logical_;
        auto it = std::find_if(logical.begin(), logical.end(),
                               [id](const LogicalTerm& t) { return t.id == id; });
        if (it == logical.end()) throw InvalidArgument("no live logical term with that id");
        const double w = it->weight;
        logical.erase(it);
        return {from_logical(n_, std::move(logical), extra_), w};
    }

private:
    void rebuild() {
        std::vector<BaseTerm> all = extra_;
        for (const auto& lt : logical_) {
            for (const auto& b : lt.expansion) {
                for (auto q : b.qubits)
                    if (q >= n_) throw InvalidArgument("term qubit out of range");
                all.push_back({b.qubits, -lt.weight * b.coefficient});
            }
        }
        for (const auto& b : extra_)
            for (auto q : b.qubits)
                if (q >= n_) throw InvalidArgument("term qubit out of range");
        auto [merged, constant] = detail::merge_terms(all);
        terms_ = std::move(merged);
        offset_ = constant;
    }

    std::size_t n_ = 0;
    std::vector<BaseTerm> terms_;
    double offset_ = 0.0;
    std::vector<LogicalTerm> logical_;
    std::vector<BaseTerm> extra_;
};

inline double evaluate(const CostHamiltonian& h, const Assignment& a) {
    if (a.size() != h.num_qubits()) throw InvalidArgument("assignment length does not match Hamiltonian");
    double e = h.offset();
    for (const auto& t : h.terms()) e += evaluate(t, a);
    return e;
}

/// Energy through the logical-term view; equals evaluate() by invariant.
inline double evaluate_logical_view(const CostHamiltonian& h, const Assignment& a) {
    if (a.size() != h.num_qubits()) throw InvalidArgument("assignment length does not match Hamiltonian");
    double e = 0.0;
    for (const auto& t : h.logical_terms()) e -= t.weight * evaluate(t, a);
    for (const auto& t : h.extra_terms()) e += evaluate(t, a);
    return e;
}

inline std::uint64_t qubit_mask(std::span<const Qubit> qubits) {
    std::uint64_t m = 0;
    for (auto q : qubits) {
        if (q >= 64) throw ResourceError("qubit index beyond 64-bit mask");
        m |= std::uint64_t{1} << q;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Encodings

/// 0/1-valued clause term: 1 - 2^-k prod_i (1 - s_i z_i), with s_i = +1 for a
/// positive literal and -1 for a negated one.
inline LogicalTerm encode_sat_clause(const Clause& clause) {
    if (clause.literals.empty()) throw EncodingError("cannot encode an empty clause");
    if (clause.has_duplicate_variable()) throw EncodingError("clause repeats a variable");
    const std::size_t k = clause.literals.size();
    if (k > 30) throw ResourceError("clause too long to expand");
    std::vector<Literal> lits = clause.literals;
    std::sort(lits.begin(), lits.end());
    const double scale = std::ldexp(1.0, -static_cast<int>(k));

    std::vector<BaseTerm> expansion;
    expansion.reserve(std::size_t{1} << k);
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << k); ++subset) {
        BaseTerm t;
        int sign = 1;
        for (std::size_t i = 0; i < k; ++i) {
            if ((subset >> i) & 1U) {
                t.qubits.push_back(lits[i].variable);
                if (!lits[i].positive) sign = -sign;
            }
        }
        const std::size_t m = t.qubits.size();
        if (m == 0)
            t.coefficient = 1.0 - scale;
        else
            t.coefficient = scale * ((m % 2 == 1) ? 1.0 : -1.0) * sign;
        expansion.push_back(std::move(t));
    }
    return {0, std::move(expansion), clause.weight, ValueDomain::ZeroOne};
}

/// +-1-valued parity term prod_{i in Q} z_i.
inline LogicalTerm encode_xorsat_term(std::vector<Qubit> qubits, double weight) {
    if (qubits.empty()) throw EncodingError("XOR term needs a nonempty qubit set");
    std::sort(qubits.begin(), qubits.end());
    if (std::adjacent_find(qubits.begin(), qubits.end()) != qubits.end())
        throw EncodingError("XOR term repeats a qubit");
    return {0, {BaseTerm{std::move(qubits), 1.0}}, weight, ValueDomain::PlusMinusOne};
}

/// H = -sum w_a h_a; ids are kept as given.
inline CostHamiltonian build_cost_hamiltonian(std::size_t n, std::vector<LogicalTerm> terms) {
    return CostHamiltonian::from_logical(n, std::move(terms));
}

/// Max-SAT Hamiltonian of a formula; logical term ids are clause indices.
inline CostHamiltonian sat_hamiltonian(const CnfFormula& f, bool use_weights = true) {
    std::vector<LogicalTerm> terms;
    terms.reserve(f.clauses.size());
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        auto t = encode_sat_clause(f.clauses[i]);
        t.id = i;
        if (!use_weights) t.weight = 1.0;
        terms.push_back(std::move(t));
    }
    return build_cost_hamiltonian(f.num_variables, std::move(terms));
}

/// Reward term (1/2)(1 - z_a z_b) for the anti-correlated split pair (a, b).
inline LogicalTerm split_pair_term(Qubit a, Qubit b, std::size_t id) {
    if (a > b) std::swap(a, b);
    return {id, {BaseTerm{{}, 0.5}, BaseTerm{{a, b}, -0.5}}, 1.0, ValueDomain::ZeroOne};
}

struct SplitTransform {
    CnfFormula formula;
    CostHamiltonian hamiltonian;
};

/// Doubles the variables so each polarity has its own qubit: literal +x_i
/// maps to x_i and -x_i to x_{i+n}. Pair rewards follow the clause terms
/// (ids m..m+n-1).
inline SplitTransform split_polarity_transform(const CnfFormula& f, bool use_weights = true) {
    if (f.is_split()) throw InvalidArgument("formula is already polarity-split");
    f.validate();
    const auto n = static_cast<Qubit>(f.num_variables);
    SplitTransform out;
    out.formula.num_variables = 2 * f.num_variables;
    out.formula.clauses.reserve(f.clauses.size());
    for (const auto& c : f.clauses) {
        Clause sc;
        sc.weight = c.weight;
        for (const auto& l : c.literals) sc.literals.push_back(pos(l.positive ? l.variable : l.variable + n));
        out.formula.clauses.push_back(std::move(sc));
    }
    for (Qubit i = 0; i < n; ++i) out.formula.split_pairs.emplace_back(i, i + n);

    auto h = sat_hamiltonian(out.formula, use_weights);
    auto terms = h.logical_terms();
    for (Qubit i = 0; i < n; ++i) terms.push_back(split_pair_term(i, i + n, f.clauses.size() + i));
    out.hamiltonian = build_cost_hamiltonian(out.formula.num_variables, std::move(terms));
    return out;
}

// ---------------------------------------------------------------------------
// Substitution

/// z_variable -> sign.
struct Fix {
    Qubit variable = 0;
    int sign = 1;
};

/// z_eliminated -> sign * z_kept.
struct Correlate {
    Qubit eliminated = 0;
    Qubit kept = 0;
    int sign = 1;
};

using SubstitutionAction = std::variant<Fix, Correlate>;

inline Qubit eliminated_variable(const SubstitutionAction& a) {
    return std::visit([](const auto& x) -> Qubit {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Fix>)
            return x.variable;
        else
            return x.eliminated;
    }, a);
}

/// Order-preserving compaction after one variable is eliminated.
struct IndexMap {
    static constexpr std::size_t kEliminated = static_cast<std::size_t>(-1);

    std::vector<std::size_t> old_to_new;
    std::size_t new_size = 0;

    static IndexMap eliminating(std::size_t n, Qubit gone) {
        IndexMap m;
        m.old_to_new.resize(n);
        std::size_t next = 0;
        for (std::size_t j = 0; j < n; ++j) m.old_to_new[j] = (j == gone) ? kEliminated : next++;
        m.new_size = next;
        return m;
    }

    Qubit operator()(Qubit old) const {
        const auto v = old_to_new.at(old);
        if (v == kEliminated) throw InternalError("eliminated variable still referenced");
        return static_cast<Qubit>(v);
    }
};

namespace detail {

inline void validate_action(const SubstitutionAction& action, std::size_t n) {
    std::visit([n](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Fix>) {
            if (x.variable >= n) throw InvalidArgument("fixed variable out of range");
            if (x.sign != 1 && x.sign != -1) throw InvalidArgument("fix sign must be +-1");
        } else {
            if (x.eliminated >= n || x.kept >= n) throw InvalidArgument("correlated variable out of range");
            if (x.eliminated == x.kept) throw InvalidArgument("cannot correlate a variable with itself");
            if (x.sign != 1 && x.sign != -1) throw InvalidArgument("correlation sign must be +-1");
        }
    }, action);
}

inline BaseTerm substitute_one(const BaseTerm& t, const SubstitutionAction& action, const IndexMap& map) {
    BaseTerm out{{}, t.coefficient};
    std::visit([&](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Fix>) {
            for (auto q : t.qubits) {
                if (q == x.variable)
                    out.coefficient *= x.sign;
                else
                    out.qubits.push_back(q);
            }
        } else {
            bool has_elim = false, has_kept = false;
            for (auto q : t.qubits) {
                if (q == x.eliminated)
                    has_elim = true;
                else if (q == x.kept)
                    has_kept = true;
                else
                    out.qubits.push_back(q);
            }
            if (has_elim) {
                out.coefficient *= x.sign;
                // z_kept^2 = 1 when both were present.
                if (!has_kept) out.qubits.push_back(x.kept);
            } else if (has_kept) {
                out.qubits.push_back(x.kept);
            }
        }
    }, action);
    for (auto& q : out.qubits) q = map(q);
    std::sort(out.qubits.begin(), out.qubits.end());
    return out;
}

}  // namespace detail

inline std::vector<BaseTerm> substitute_terms(std::span<const BaseTerm> terms,
                                              const SubstitutionAction& action, const IndexMap& map) {
    std::vector<BaseTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(detail::substitute_one(t, action, map));
    return out;
}

inline LogicalTerm substitute(const LogicalTerm& term, const SubstitutionAction& action, const IndexMap& map) {
    LogicalTerm out = term;
    out.expansion = detail::merged_expansion(substitute_terms(term.expansion, action, map));
    return out;
}

struct Substituted {
    CostHamiltonian hamiltonian;
    IndexMap index_map;
};

/// Applies a Fix or Correlate to every base and logical term, compacting
/// variable indices. Logical terms left constant are folded into the
/// constant part.
inline Substituted substitute(const CostHamiltonian& h, const SubstitutionAction& action) {
    detail::validate_action(action, h.num_qubits());
    auto map = IndexMap::eliminating(h.num_qubits(), eliminated_variable(action));

    std::vector<LogicalTerm> logical;
    std::vector<BaseTerm> extra = substitute_terms(h.extra_terms(), action, map);
    for (const auto& lt : h.logical_terms()) {
        auto s = substitute(lt, action, map);
        if (s.is_constant())
            extra.push_back({{}, -s.weight * s.constant_part()});
        else
            logical.push_back(std::move(s));
    }
    auto [merged, constant] = detail::merge_terms(extra);
    merged.push_back({{}, constant});
    return {CostHamiltonian::from_logical(map.new_size, std::move(logical), std::move(merged)), map};
}

}  // namespace iqa
