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

// Truth-table inference over constraint sets. Every connected component of
// the constraint hypergraph is enumerated exhaustively; the satisfying rows
// then reveal forced variables, forced (anti-)correlated pairs and terms
// that take one value on every row.

#include <map>
#include <numeric>
#include <string>
#include <unordered_map>

#include "iqa/problem.hpp"

namespace iqa {

inline constexpr std::size_t kDefaultComponentCap = 22;

struct Constraint {
    LogicalTerm term;
    double required_value = 1.0;

    bool satisfied_by(const Assignment& a) const {
        return std::abs(evaluate(term, a) - required_value) < 1e-9;
    }
};

struct ConstraintSet {
    std::size_t n = 0;
    std::vector<Constraint> constraints;
};

struct Component {
    std::vector<std::size_t> constraints;  // indices into the set
    std::vector<Qubit> variables;          // sorted
};

/// Union-find over variables; constraints sharing a variable land together.
/// Constraints with empty support each form their own variable-free
/// component. Components are ordered by their first constraint.
inline std::vector<Component> connected_components(const ConstraintSet& cs) {
    std::vector<Qubit> parent(cs.n);
    std::iota(parent.begin(), parent.end(), Qubit{0});
    auto find = [&](Qubit x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::vector<Qubit>> supports;
    for (const auto& c : cs.constraints) {
        auto s = c.term.support();
        for (auto q : s)
            if (q >= cs.n) throw InvalidArgument("constraint variable out of range");
        for (std::size_t i = 1; i < s.size(); ++i) {
            const auto a = find(s[0]), b = find(s[i]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
        supports.push_back(std::move(s));
    }
    std::vector<Component> out;
    std::map<Qubit, std::size_t> by_root;
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        if (supports[i].empty()) {
            out.push_back({{i}, {}});
            continue;
        }
        const auto r = find(supports[i][0]);
        auto [it, inserted] = by_root.try_emplace(r, out.size());
        if (inserted) out.push_back({});
        auto& comp = out[it->second];
        comp.constraints.push_back(i);
        comp.variables.insert(comp.variables.end(), supports[i].begin(), supports[i].end());
    }
    for (auto& c : out) {
        std::sort(c.variables.begin(), c.variables.end());
        c.variables.erase(std::unique(c.variables.begin(), c.variables.end()), c.variables.end());
    }
    return out;
}

/// Rows are bit masks over the columns: bit i set <=> column i is +1.
struct SatisfyingMatrix {
    std::vector<Qubit> columns;
    std::vector<std::uint32_t> rows;

    std::size_t num_columns() const { return columns.size(); }
    std::size_t num_rows() const { return rows.size(); }
    int entry(std::size_t r, std::size_t c) const { return ((rows[r] >> c) & 1U) ? 1 : -1; }

    long column_sum(std::size_t c) const {
        long s = 0;
        for (auto r : rows) s += ((r >> c) & 1U) ? 1 : -1;
        return s;
    }

    /// The row as an assignment over `n` ambient variables (others -1).
    Assignment row_assignment(std::size_t r, std::size_t n) const {
        Assignment a(n);
        for (std::size_t c = 0; c < columns.size(); ++c) a.set(columns[c], entry(r, c));
        return a;
    }
};

namespace detail {

/// A term over local column indices for fast evaluation.
struct MaskedTerm {
    std::vector<std::pair<std::uint32_t, double>> parts;  // (mask, signed coefficient at all -1)

    double operator()(std::uint32_t u) const {
        double v = 0.0;
        for (auto [m, c] : parts) v += (std::popcount(u & m) & 1) ? -c : c;
        return v;
    }
};

inline MaskedTerm mask_term(const LogicalTerm& t, const std::vector<Qubit>& columns) {
    MaskedTerm out;
    for (const auto& b : t.expansion) {
        std::uint32_t m = 0;
        for (auto q : b.qubits) {
            auto it = std::lower_bound(columns.begin(), columns.end(), q);
            if (it == columns.end() || *it != q) throw InvalidArgument("term reaches outside the component");
            m |= std::uint32_t{1} << (it - columns.begin());
        }
        // Product of spins is (-1)^{|Q|} at u = 0 and flips with each set bit.
        out.parts.emplace_back(m, (b.qubits.size() % 2 == 0) ? b.coefficient : -b.coefficient);
    }
    return out;
}

inline bool contains_all(const std::vector<Qubit>& sorted, const std::vector<Qubit>& sub) {
    return std::all_of(sub.begin(), sub.end(), [&](Qubit q) { return std::binary_search(sorted.begin(), sorted.end(), q); });
}

}  // namespace detail

/// All assignments of the component's variables satisfying every one of its
/// constraints.
inline SatisfyingMatrix enumerate_satisfying(const ConstraintSet& cs, const Component& comp,
                                             std::size_t cap = kDefaultComponentCap) {
    if (comp.variables.size() > cap || comp.variables.size() > 31)
        throw ResourceError("component of " + std::to_string(comp.variables.size()) + " variables exceeds the enumeration cap");
    SatisfyingMatrix M;
    M.columns = comp.variables;
    std::vector<std::pair<detail::MaskedTerm, double>> checks;
    for (auto i : comp.constraints)
        checks.emplace_back(detail::mask_term(cs.constraints[i].term, M.columns), cs.constraints[i].required_value);
    const std::uint32_t end = std::uint32_t{1} << M.columns.size();
    for (std::uint32_t u = 0; u < end; ++u) {
        bool ok = true;
        for (const auto& [t, want] : checks)
            if (std::abs(t(u) - want) >= 1e-9) {
                ok = false;
                break;
            }
        if (ok) M.rows.push_back(u);
    }
    return M;
}

struct FixedVariable {
    Qubit variable;
    int sign;
    friend auto operator<=>(const FixedVariable&, const FixedVariable&) = default;
};

struct CorrelatedPair {
    Qubit r;  // r < s
    Qubit s;
    int sign;
    friend auto operator<=>(const CorrelatedPair&, const CorrelatedPair&) = default;
};

struct FixedTerm {
    std::size_t id;
    double value;
    friend bool operator==(const FixedTerm&, const FixedTerm&) = default;
};

/// Columns whose sum is +-m'.
inline std::vector<FixedVariable> infer_fixed_variables(const SatisfyingMatrix& M) {
    if (M.rows.empty()) throw InvalidArgument("no satisfying rows");
    std::vector<FixedVariable> out;
    const long m = static_cast<long>(M.num_rows());
    for (std::size_t c = 0; c < M.num_columns(); ++c) {
        const long h = M.column_sum(c);
        if (h == m || h == -m) out.push_back({M.columns[c], h > 0 ? 1 : -1});
    }
    return out;
}

struct CorrelationOptions {
    /// Compare every pair directly, skipping both the pigeonhole shortcut
    /// and the column-sum grouping.
    bool full_scan = false;
};

/// Pairs (r, s) among non-fixed columns with sum_i M_ir M_is = +-m'. Fixed
/// columns are dropped and duplicate rows merged first.
inline std::vector<CorrelatedPair> infer_correlations(const SatisfyingMatrix& M, CorrelationOptions opt = {}) {
    if (M.rows.empty()) return {};
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < M.num_columns(); ++c) {
        const long h = M.column_sum(c), m = static_cast<long>(M.num_rows());
        if (h != m && h != -m) keep.push_back(c);
    }
    std::vector<std::uint32_t> rows;
    rows.reserve(M.rows.size());
    for (auto r : M.rows) {
        std::uint32_t x = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) x |= ((r >> keep[i]) & 1U) << i;
        rows.push_back(x);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    const std::size_t nn = keep.size();
    const long m = static_cast<long>(rows.size());
    if (nn < 2) return {};

    auto sum = [&](std::size_t c) {
        long s = 0;
        for (auto r : rows) s += ((r >> c) & 1U) ? 1 : -1;
        return s;
    };
    auto pair_sum = [&](std::size_t a, std::size_t b) {
        long s = 0;
        for (auto r : rows) s += (((r >> a) ^ (r >> b)) & 1U) ? -1 : 1;
        return s;
    };

    std::vector<CorrelatedPair> out;
    auto emit = [&](std::size_t a, std::size_t b) {
        const long c = pair_sum(a, b);
        if (c == m || c == -m) out.push_back({M.columns[keep[a]], M.columns[keep[b]], c > 0 ? 1 : -1});
    };
    if (opt.full_scan) {
        for (std::size_t a = 0; a < nn; ++a)
            for (std::size_t b = a + 1; b < nn; ++b) emit(a, b);
    } else {
        // A correlated pair halves the space of distinct rows.
        if (nn <= 32 && static_cast<std::uint64_t>(m) > (std::uint64_t{1} << (nn - 1))) return {};
        std::map<long, std::vector<std::size_t>> groups;
        for (std::size_t c = 0; c < nn; ++c) groups[std::abs(sum(c))].push_back(c);
        for (const auto& [_, g] : groups)
            for (std::size_t a = 0; a < g.size(); ++a)
                for (std::size_t b = a + 1; b < g.size(); ++b) emit(g[a], g[b]);
        std::sort(out.begin(), out.end());
    }
    return out;
}

/// Candidate terms (supported inside the matrix columns) that evaluate the
/// same on every row.
inline std::vector<FixedTerm> infer_fixed_terms(const SatisfyingMatrix& M, std::span<const LogicalTerm> terms) {
    std::vector<FixedTerm> out;
    if (M.rows.empty()) return out;
    for (const auto& t : terms) {
        const auto s = t.support();
        if (!detail::contains_all(M.columns, s)) throw InvalidArgument("candidate term reaches outside the component");
        const auto mt = detail::mask_term(t, M.columns);
        const double v0 = mt(M.rows[0]);
        bool fixed = true;
        for (std::size_t r = 1; r < M.rows.size() && fixed; ++r) fixed = std::abs(mt(M.rows[r]) - v0) < 1e-9;
        if (fixed) out.push_back({t.id, std::round(v0 * 1e9) / 1e9});
    }
    return out;
}

struct InferenceResult {
    std::vector<FixedVariable> fixed;
    std::vector<CorrelatedPair> correlated;
    std::vector<FixedTerm> fixed_terms;
    bool contradiction = false;
    /// Components skipped because they exceeded the enumeration cap.
    std::vector<Component> deferred;

    bool empty() const { return fixed.empty() && correlated.empty() && fixed_terms.empty(); }
};

struct InferenceOptions {
    std::size_t component_cap = kDefaultComponentCap;
    CorrelationOptions correlation;
};

/// Satisfying matrices keyed by the component's constraint multiset, so
/// untouched components are not re-enumerated between iterations.
class InferenceCache {
public:
    const SatisfyingMatrix& get(const ConstraintSet& cs, const Component& comp, std::size_t cap) {
        auto key = make_key(cs, comp);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++hits_;
            return it->second;
        }
        ++misses_;
        return cache_.emplace(std::move(key), enumerate_satisfying(cs, comp, cap)).first->second;
    }

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    void clear() { cache_.clear(); }

private:
    static std::string make_key(const ConstraintSet& cs, const Component& comp) {
        std::vector<std::string> parts;
        for (auto i : comp.constraints) {
            const auto& c = cs.constraints[i];
            std::string s = std::to_string(c.required_value) + ":";
            for (const auto& b : c.term.expansion) {
                for (auto q : b.qubits) s += std::to_string(q) + ",";
                s += "=" + std::to_string(b.coefficient) + ";";
            }
            parts.push_back(std::move(s));
        }
        std::sort(parts.begin(), parts.end());
        std::string key;
        for (auto& p : parts) key += p + "|";
        return key;
    }

    std::unordered_map<std::string, SatisfyingMatrix> cache_;
    std::size_t hits_ = 0, misses_ = 0;
};

/// Per-component enumeration, then fixes, correlations and fixed terms.
/// Candidate terms spanning several components are not examined.
inline InferenceResult run_inference(const ConstraintSet& cs, std::span<const LogicalTerm> candidates,
                                     InferenceOptions opt = {}, InferenceCache* cache = nullptr) {
    InferenceResult res;
    for (const auto& comp : connected_components(cs)) {
        SatisfyingMatrix local;
        const SatisfyingMatrix* M = nullptr;
        try {
            if (cache)
                M = &cache->get(cs, comp, opt.component_cap);
            else {
                local = enumerate_satisfying(cs, comp, opt.component_cap);
                M = &local;
            }
        } catch (const ResourceError&) {
            res.deferred.push_back(comp);
            continue;
        }
        if (M->rows.empty()) {
            res.contradiction = true;
            continue;
        }
        if (comp.variables.empty()) continue;
        auto fx = infer_fixed_variables(*M);
        res.fixed.insert(res.fixed.end(), fx.begin(), fx.end());
        auto cr = infer_correlations(*M, opt.correlation);
        res.correlated.insert(res.correlated.end(), cr.begin(), cr.end());
        std::vector<LogicalTerm> inside;
        for (const auto& t : candidates) {
            const auto s = t.support();
            if (!s.empty() && detail::contains_all(comp.variables, s)) inside.push_back(t);
        }
        auto ft = infer_fixed_terms(*M, inside);
        res.fixed_terms.insert(res.fixed_terms.end(), ft.begin(), ft.end());
    }
    std::sort(res.fixed.begin(), res.fixed.end());
    std::sort(res.correlated.begin(), res.correlated.end());
    std::sort(res.fixed_terms.begin(), res.fixed_terms.end(),
              [](const FixedTerm& a, const FixedTerm& b) { return a.id < b.id; });
    return res;
}

}  // namespace iqa
