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

// Seeded random instance generators.

#include <cmath>
#include <set>

#include "iqa/problem.hpp"
#include "iqa/random.hpp"

namespace iqa {

/// Clause count at the random k-SAT threshold, m = round(n ln2 2^k).
inline std::size_t critical_clause_count(std::size_t n, std::size_t k) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(n) * std::log(2.0) * std::ldexp(1.0, static_cast<int>(k))));
}

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::uint64_t num = n - k + i;
        if (r > UINT64_MAX / num) return UINT64_MAX;
        r = r * num / i;
    }
    return r;
}

namespace detail {

/// k distinct variables in increasing order.
inline std::vector<Qubit> sample_distinct(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<Qubit> vars;
    vars.reserve(k);
    while (vars.size() < k) {
        const auto v = static_cast<Qubit>(rng.below(n));
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    return vars;
}

}  // namespace detail

/// m clauses of exactly k distinct variables with uniform polarities.
/// Weighted instances draw weights uniformly from [0, 1].
inline CnfFormula gen_random_ksat(std::size_t n, std::size_t k, std::size_t m, bool weighted, std::uint64_t seed) {
    if (k == 0 || k > n) throw InvalidArgument("random k-SAT needs 1 <= k <= n");
    Rng rng(seed);
    CnfFormula f;
    f.num_variables = n;
    f.clauses.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        Clause c;
        for (auto v : detail::sample_distinct(rng, n, k)) c.literals.push_back({v, rng.coin()});
        c.weight = weighted ? rng.uniform() : 1.0;
        f.clauses.push_back(std::move(c));
    }
    return f;
}

/// m distinct size-k hyperedges with XOR rewards uniform in [-1, 1].
inline CostHamiltonian gen_random_xorsat(std::size_t n, std::size_t k, std::size_t m, std::uint64_t seed) {
    if (k == 0 || k > n) throw InvalidArgument("random XORSAT needs 1 <= k <= n");
    if (m > binomial(n, k)) throw InvalidArgument("more hyperedges requested than exist");
    Rng rng(seed);
    std::set<std::vector<Qubit>> seen;
    std::vector<LogicalTerm> terms;
    terms.reserve(m);
    while (terms.size() < m) {
        auto edge = detail::sample_distinct(rng, n, k);
        if (!seen.insert(edge).second) continue;
        auto t = encode_xorsat_term(std::move(edge), rng.uniform(-1.0, 1.0));
        t.id = terms.size();
        terms.push_back(std::move(t));
    }
    return build_cost_hamiltonian(n, std::move(terms));
}

/// Lift a structureless Hamiltonian to one XOR logical term per base term
/// (w = -c), which is how XORSAT instances are reloaded from JSON.
inline CostHamiltonian xorsat_from_base(const CostHamiltonian& h) {
    std::vector<LogicalTerm> terms;
    for (const auto& b : h.terms()) {
        auto t = encode_xorsat_term(b.qubits, -b.coefficient);
        t.id = terms.size();
        terms.push_back(std::move(t));
    }
    return CostHamiltonian::from_logical(h.num_qubits(), std::move(terms), {BaseTerm{{}, h.offset()}});
}

}  // namespace iqa
