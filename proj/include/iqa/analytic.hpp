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

// Closed-form p = 1 QAOA expectation values evaluated by enumerating local
// neighborhoods, plus the classical clause-weight scores they reduce to at
// small gamma.

#include <array>
#include <complex>
#include <numbers>

#include "iqa/problem.hpp"

namespace iqa {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultNeighborhoodCap = 22;
inline constexpr std::size_t kDefaultCorrelatorCap = 24;

// ---------------------------------------------------------------------------
// Clause scores

/// sum over clauses with +x_j of 2^-k minus the same over clauses with -x_j.
inline double first_order_coeff(const CnfFormula& f, Qubit j) {
    double c = 0.0;
    for (const auto& cl : f.clauses) {
        const double w = std::ldexp(1.0, -static_cast<int>(cl.size()));
        for (const auto& l : cl.literals)
            if (l.variable == j) c += l.positive ? w : -w;
    }
    return c;
}

/// sum of 2^-k over clauses containing exactly the literal l.
inline double jw_score(const CnfFormula& f, Literal l) {
    double c = 0.0;
    for (const auto& cl : f.clauses)
        if (std::find(cl.literals.begin(), cl.literals.end(), l) != cl.literals.end())
            c += std::ldexp(1.0, -static_cast<int>(cl.size()));
    return c;
}

// ---------------------------------------------------------------------------
// Neighborhood views

/// The Hamiltonian as seen from qubit j: C'_j(z) = c_j + C_j(z), where the
/// terms of C_j have z_j factored out.
struct NeighborhoodView {
    Qubit j = 0;
    double c_j = 0.0;
    std::vector<BaseTerm> C_j_terms;
    std::vector<Qubit> neighbors;

    std::size_t degree() const { return neighbors.size(); }
};

inline NeighborhoodView neighborhood_view(const CostHamiltonian& h, Qubit j) {
    if (j >= h.num_qubits()) throw InvalidArgument("qubit index out of range");
    NeighborhoodView v;
    v.j = j;
    for (const auto& t : h.terms()) {
        if (!std::binary_search(t.qubits.begin(), t.qubits.end(), j)) continue;
        if (t.qubits.size() == 1) {
            v.c_j += t.coefficient;
            continue;
        }
        BaseTerm r{{}, t.coefficient};
        for (auto q : t.qubits)
            if (q != j) r.qubits.push_back(q);
        v.neighbors.insert(v.neighbors.end(), r.qubits.begin(), r.qubits.end());
        v.C_j_terms.push_back(std::move(r));
    }
    std::sort(v.neighbors.begin(), v.neighbors.end());
    v.neighbors.erase(std::unique(v.neighbors.begin(), v.neighbors.end()), v.neighbors.end());
    return v;
}

struct SubsetView {
    std::vector<Qubit> q;
    std::vector<BaseTerm> C_q;  // terms holding an odd number of bits of q
    std::vector<Qubit> neighbors;

    std::size_t k() const { return q.size(); }
    std::size_t degree() const { return neighbors.size(); }
};

/// The Hamiltonian as seen from a term's qubit set Q.
struct TermNeighborhoodView {
    std::size_t alpha = 0;
    std::vector<Qubit> Q;
    double weight = 0.0;  // carried for completeness; no formula here uses it
    std::vector<BaseTerm> C_alpha;  // every base term touching Q
    std::vector<Qubit> neighbors;   // support of C_alpha outside Q
    std::vector<SubsetView> subsets;  // all nonempty q of Q

    std::size_t k() const { return Q.size(); }
    std::size_t degree() const { return neighbors.size(); }
};

namespace detail {

inline std::vector<Qubit> sorted_unique(std::vector<Qubit> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline std::vector<Qubit> checked_qubit_set(std::vector<Qubit> Q, std::size_t n) {
    if (Q.empty()) throw InvalidArgument("qubit set must be nonempty");
    std::sort(Q.begin(), Q.end());
    if (std::adjacent_find(Q.begin(), Q.end()) != Q.end()) throw InvalidArgument("qubit set repeats an index");
    if (Q.back() >= n) throw InvalidArgument("qubit index out of range");
    return Q;
}

inline std::size_t overlap(const std::vector<Qubit>& a, const std::vector<Qubit>& b) {
    std::size_t c = 0;
    for (auto q : a) c += std::binary_search(b.begin(), b.end(), q) ? 1 : 0;
    return c;
}

inline std::vector<Qubit> support_outside(const std::vector<BaseTerm>& terms, const std::vector<Qubit>& Q) {
    std::vector<Qubit> out;
    for (const auto& t : terms)
        for (auto q : t.qubits)
            if (!std::binary_search(Q.begin(), Q.end(), q)) out.push_back(q);
    return sorted_unique(std::move(out));
}

}  // namespace detail

inline TermNeighborhoodView term_neighborhood_view(const CostHamiltonian& h, std::vector<Qubit> Q,
                                                   std::size_t alpha = 0, double weight = 0.0) {
    TermNeighborhoodView v;
    v.alpha = alpha;
    v.weight = weight;
    v.Q = detail::checked_qubit_set(std::move(Q), h.num_qubits());
    if (v.Q.size() > 16) throw ResourceError("term too large for a subset view");
    for (const auto& t : h.terms())
        if (detail::overlap(t.qubits, v.Q) > 0) v.C_alpha.push_back(t);
    v.neighbors = detail::support_outside(v.C_alpha, v.Q);
    for (std::uint32_t s = 1; s < (1U << v.Q.size()); ++s) {
        SubsetView sv;
        for (std::size_t i = 0; i < v.Q.size(); ++i)
            if ((s >> i) & 1U) sv.q.push_back(v.Q[i]);
        for (const auto& t : v.C_alpha)
            if (detail::overlap(t.qubits, sv.q) % 2 == 1) sv.C_q.push_back(t);
        sv.neighbors = detail::support_outside(sv.C_q, sv.q);
        v.subsets.push_back(std::move(sv));
    }
    return v;
}

// ---------------------------------------------------------------------------
// Single-Z expectation at p = 1

namespace detail {

/// Terms over local neighbor indices, as (mask, coefficient, |Q| parity).
struct LocalTerm {
    std::uint64_t mask;
    double coefficient;
    bool odd;
};

inline std::vector<LocalTerm> localize(const std::vector<BaseTerm>& terms, const std::vector<Qubit>& order) {
    std::vector<LocalTerm> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        std::uint64_t m = 0;
        for (auto q : t.qubits) {
            auto it = std::lower_bound(order.begin(), order.end(), q);
            m |= std::uint64_t{1} << (it - order.begin());
        }
        out.push_back({m, t.coefficient, t.qubits.size() % 2 == 1});
    }
    return out;
}

/// Value of sum_t c_t prod_{i in t} z_i at local basis index u.
inline double local_value(const std::vector<LocalTerm>& terms, std::uint64_t u) {
    double s = 0.0;
    for (const auto& t : terms) {
        // prod z = (-1)^{|t| - popcount(u & mask)}
        const bool negative = ((std::popcount(u & t.mask) & 1) != 0) != t.odd;
        s += negative ? -t.coefficient : t.coefficient;
    }
    return s;
}

}  // namespace detail

/// Exact <Z_j> of p = 1 QAOA:
///   -sin(2 beta) / 2^d  sum_z [ sin(2 gamma c_j) cos(2 gamma C_j(z)) + cos(2 gamma c_j) sin(2 gamma C_j(z)) ]
/// summed over the 2^d assignments of j's neighborhood.
inline double single_z_p1(const NeighborhoodView& v, double beta, double gamma,
                          std::size_t cap = kDefaultNeighborhoodCap) {
    const std::size_t d = v.degree();
    if (d > cap) throw ResourceError("neighborhood of size " + std::to_string(d) + " exceeds the cap");
    const auto terms = detail::localize(v.C_j_terms, v.neighbors);
    const double sc = std::sin(2 * gamma * v.c_j), cc = std::cos(2 * gamma * v.c_j);
    double sum_cos = 0.0, sum_sin = 0.0;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << d); ++u) {
        const double C = detail::local_value(terms, u);
        sum_cos += std::cos(2 * gamma * C);
        sum_sin += std::sin(2 * gamma * C);
    }
    return -std::sin(2 * beta) * std::ldexp(sc * sum_cos + cc * sum_sin, -static_cast<int>(d));
}

inline double single_z_p1(const CostHamiltonian& h, Qubit j, double beta, double gamma,
                          std::size_t cap = kDefaultNeighborhoodCap) {
    return single_z_p1(neighborhood_view(h, j), beta, gamma, cap);
}

/// Third-order expansion in gamma:
///   -2 gamma sin(2 beta) c_j + 4 gamma^3 sin(2 beta) / (3 2^d) sum_z (c_j + C_j(z))^3
inline double single_z_small_gamma(const CostHamiltonian& h, Qubit j, double beta, double gamma,
                                   std::size_t cap = kDefaultNeighborhoodCap) {
    const auto v = neighborhood_view(h, j);
    const std::size_t d = v.degree();
    if (d > cap) throw ResourceError("neighborhood of size " + std::to_string(d) + " exceeds the cap");
    const auto terms = detail::localize(v.C_j_terms, v.neighbors);
    double cubes = 0.0;
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << d); ++u) {
        const double x = v.c_j + detail::local_value(terms, u);
        cubes += x * x * x;
    }
    const double s2b = std::sin(2 * beta);
    return -2 * gamma * s2b * v.c_j + 4 * gamma * gamma * gamma * s2b / 3.0 * std::ldexp(cubes, -static_cast<int>(d));
}

// ---------------------------------------------------------------------------
// Higher-locality correlators at p = 1

/// Exact <prod_{j in Q} Z_j> of p = 1 QAOA by enumerating the neighborhood
/// of Q and both bra and ket copies of the Q bits:
///   2^-(d+k) sum_y sum_{z,z'} e^{i gamma (C(z,y) - C(z',y))} prod_j f(z_j, z'_j)
/// with f(z, z') = (e^{2 i beta} z + e^{-2 i beta} z') / 2. Only terms touching Q
/// enter C. The inner double sum is v^dagger (f x ... x f) v with v = e^{-i gamma C}.
inline double correlator_p1(const CostHamiltonian& h, std::vector<Qubit> Q, double beta, double gamma,
                            std::size_t cap = kDefaultCorrelatorCap) {
    Q = detail::checked_qubit_set(std::move(Q), h.num_qubits());
    std::vector<BaseTerm> touching;
    for (const auto& t : h.terms())
        if (detail::overlap(t.qubits, Q) > 0) touching.push_back(t);
    const auto nbrs = detail::support_outside(touching, Q);
    const std::size_t k = Q.size(), d = nbrs.size();
    if (d + 2 * k > cap) throw ResourceError("correlator enumeration 2^" + std::to_string(d + 2 * k) + " exceeds the cap");

    // Local order: Q bits first, then the neighborhood.
    std::vector<Qubit> order = Q;
    order.insert(order.end(), nbrs.begin(), nbrs.end());
    std::vector<detail::LocalTerm> terms;
    for (const auto& t : touching) {
        std::uint64_t m = 0;
        for (auto q : t.qubits) m |= std::uint64_t{1} << (std::find(order.begin(), order.end(), q) - order.begin());
        terms.push_back({m, t.coefficient, t.qubits.size() % 2 == 1});
    }

    const Complex e_p = std::polar(1.0, 2 * beta), e_m = std::polar(1.0, -2 * beta);
    // f[z][z'] with index 0 <=> spin -1.
    Complex f[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) f[a][b] = (e_p * double(2 * a - 1) + e_m * double(2 * b - 1)) / 2.0;

    const std::size_t kdim = std::size_t{1} << k;
    std::vector<Complex> v(kdim), w(kdim);
    Complex total = 0.0;
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << d); ++y) {
        for (std::size_t z = 0; z < kdim; ++z) v[z] = std::polar(1.0, -gamma * detail::local_value(terms, z | (y << k)));
        w = v;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t stride = std::size_t{1} << j;
            for (std::size_t base = 0; base < kdim; base += 2 * stride)
                for (std::size_t x = base; x < base + stride; ++x) {
                    const Complex a0 = w[x], a1 = w[x + stride];
                    w[x] = f[0][0] * a0 + f[0][1] * a1;
                    w[x + stride] = f[1][0] * a0 + f[1][1] * a1;
                }
        }
        for (std::size_t z = 0; z < kdim; ++z) total += std::conj(v[z]) * w[z];
    }
    total = std::ldexp(1.0, -static_cast<int>(d + k)) * total;
    if (std::abs(total.imag()) > 1e-8) throw InternalError("correlator has a non-negligible imaginary part");
    return total.real();
}

// ---------------------------------------------------------------------------
// Two-local closed form

namespace detail {

inline void require_two_local(const CostHamiltonian& h, Qubit j, double& c_j, std::vector<double>& couplings) {
    if (!h.is_k_local(2)) throw InvalidArgument("Hamiltonian is not 2-local");
    if (j >= h.num_qubits()) throw InvalidArgument("qubit index out of range");
    for (const auto& t : h.terms()) {
        if (!std::binary_search(t.qubits.begin(), t.qubits.end(), j)) continue;
        if (t.qubits.size() == 1)
            c_j += t.coefficient;
        else
            couplings.push_back(t.coefficient);
    }
}

}  // namespace detail

/// -sin(2 beta) sin(2 gamma c_j) prod_k cos(2 gamma J_kj).
inline double two_local_single_z(const CostHamiltonian& h, Qubit j, double beta, double gamma) {
    double c = 0.0;
    std::vector<double> J;
    detail::require_two_local(h, j, c, J);
    double prod = 1.0;
    for (double x : J) prod *= std::cos(2 * gamma * x);
    return -std::sin(2 * beta) * std::sin(2 * gamma * c) * prod;
}

/// The same product with cos(2 gamma c_j) in place of sin(2 gamma c_j), the
/// form that appears in print. Kept only so the discrepancy can be reported.
inline double two_local_single_z_printed(const CostHamiltonian& h, Qubit j, double beta, double gamma) {
    double c = 0.0;
    std::vector<double> J;
    detail::require_two_local(h, j, c, J);
    double prod = 1.0;
    for (double x : J) prod *= std::cos(2 * gamma * x);
    return -std::sin(2 * beta) * std::cos(2 * gamma * c) * prod;
}

}  // namespace iqa
