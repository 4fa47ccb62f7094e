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

// Exact QAOA state preparation on a dense state vector.
//
//   |psi> = prod_i exp(-i beta_i B) exp(-i gamma_i C) |+>^n,   B = -sum_j X_j
//
// so each mixer layer applies cos(beta) I + i sin(beta) X to every qubit.
// Basis index bit j set <=> z_j = +1.

#include <complex>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "iqa/problem.hpp"
#include "iqa/random.hpp"

namespace iqa {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultStateCap = 26;
inline constexpr std::size_t kDefaultBruteForceCap = 24;

struct QaoaParams {
    std::vector<double> betas;
    std::vector<double> gammas;

    QaoaParams() = default;
    QaoaParams(std::vector<double> b, std::vector<double> g) : betas(std::move(b)), gammas(std::move(g)) {}

    std::size_t p() const { return betas.size(); }

    void validate() const {
        if (betas.size() != gammas.size() || betas.empty())
            throw InvalidArgument("QAOA needs equal, nonzero numbers of beta and gamma angles");
    }

    friend bool operator==(const QaoaParams&, const QaoaParams&) = default;
};

/// The diagonal of C over all 2^n basis states, built once per Hamiltonian.
/// When C takes few distinct values (unweighted SAT energies are integers)
/// the table is also stored as indices into the distinct values, so a phase
/// layer needs only one exp per distinct energy.
class DiagonalCost {
public:
    DiagonalCost() = default;

    explicit DiagonalCost(const CostHamiltonian& h, std::size_t cap = kDefaultStateCap) : n_(h.num_qubits()) {
        if (n_ > cap) throw ResourceError("Hamiltonian has " + std::to_string(n_) + " qubits, over the cap of " + std::to_string(cap));
        const std::size_t dim = std::size_t{1} << n_;
        values_.assign(dim, h.offset());
        for (const auto& t : h.terms()) {
            const std::uint64_t mask = qubit_mask(t.qubits);
            const double c = t.coefficient;
            // parity(x & mask) even <=> product of spins is (-1)^{|Q|}.
            const double even = (t.qubits.size() % 2 == 0) ? c : -c;
            for (std::size_t x = 0; x < dim; ++x)
                values_[x] += (std::popcount(x & mask) & 1) ? -even : even;
        }
        compress();
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t dimension() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t x) const { return values_[x]; }

    bool compressed() const { return !levels_.empty(); }
    const std::vector<double>& levels() const { return levels_; }
    const std::vector<std::uint16_t>& level_index() const { return level_index_; }

private:
    void compress() {
        constexpr std::size_t kMaxLevels = 4096;
        std::unordered_map<double, std::uint16_t> seen;
        std::vector<double> levels;
        std::vector<std::uint16_t> index(values_.size());
        for (std::size_t x = 0; x < values_.size(); ++x) {
            auto [it, inserted] = seen.try_emplace(values_[x], static_cast<std::uint16_t>(levels.size()));
            if (inserted) {
                if (levels.size() == kMaxLevels) return;
                levels.push_back(values_[x]);
            }
            index[x] = it->second;
        }
        levels_ = std::move(levels);
        level_index_ = std::move(index);
    }

    std::size_t n_ = 0;
    std::vector<double> values_;
    std::vector<double> levels_;
    std::vector<std::uint16_t> level_index_;
};

class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::size_t n) : n_(n), amps_(std::size_t{1} << n) {}
    StateVector(std::size_t n, std::vector<Complex> amps) : n_(n), amps_(std::move(amps)) {
        if (amps_.size() != (std::size_t{1} << n)) throw InvalidArgument("amplitude count must be 2^n");
    }

    static StateVector plus(std::size_t n) {
        StateVector s(n);
        const double a = 1.0 / std::sqrt(static_cast<double>(s.amps_.size()));
        std::fill(s.amps_.begin(), s.amps_.end(), Complex(a, 0.0));
        return s;
    }

    static StateVector basis(std::size_t n, std::uint64_t index) {
        StateVector s(n);
        s.amps_.at(index) = 1.0;
        return s;
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t dimension() const { return amps_.size(); }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    std::vector<Complex>& amplitudes() { return amps_; }
    Complex operator[](std::size_t x) const { return amps_[x]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    /// exp(-i gamma C) with C given by its diagonal.
    void apply_phase(const DiagonalCost& c, double gamma) {
        if (c.dimension() != amps_.size()) throw InvalidArgument("cost table and state differ in size");
        if (c.compressed()) {
            const auto& lv = c.levels();
            phase_scratch_.resize(lv.size());
            for (std::size_t i = 0; i < lv.size(); ++i) phase_scratch_[i] = std::polar(1.0, -gamma * lv[i]);
            const auto& idx = c.level_index();
            for (std::size_t x = 0; x < amps_.size(); ++x) amps_[x] *= phase_scratch_[idx[x]];
        } else {
            for (std::size_t x = 0; x < amps_.size(); ++x) amps_[x] *= std::polar(1.0, -gamma * c[x]);
        }
    }

    /// exp(-i beta B) = prod_j (cos beta I + i sin beta X_j).
    void apply_mixer(double beta) {
        const double cb = std::cos(beta), sb = std::sin(beta);
        const std::size_t dim = amps_.size();
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t stride = std::size_t{1} << j;
            for (std::size_t base = 0; base < dim; base += 2 * stride) {
                for (std::size_t x = base; x < base + stride; ++x) {
                    const Complex a0 = amps_[x], a1 = amps_[x + stride];
                    // i sin(beta) * a = (-sb*im, sb*re)
                    amps_[x] = Complex(cb * a0.real() - sb * a1.imag(), cb * a0.imag() + sb * a1.real());
                    amps_[x + stride] = Complex(cb * a1.real() - sb * a0.imag(), cb * a1.imag() + sb * a0.real());
                }
            }
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<Complex> amps_;
    std::vector<Complex> phase_scratch_;
};

inline StateVector prepare_state(const DiagonalCost& c, const QaoaParams& params) {
    params.validate();
    auto s = StateVector::plus(c.num_qubits());
    for (std::size_t i = 0; i < params.p(); ++i) {
        s.apply_phase(c, params.gammas[i]);
        s.apply_mixer(params.betas[i]);
    }
    return s;
}

inline StateVector prepare_state(const CostHamiltonian& h, const QaoaParams& params, std::size_t cap = kDefaultStateCap) {
    return prepare_state(DiagonalCost(h, cap), params);
}

inline double energy_expectation(const StateVector& s, const DiagonalCost& c) {
    if (c.dimension() != s.dimension()) throw InvalidArgument("cost table and state differ in size");
    double e = 0.0;
    const auto& a = s.amplitudes();
    for (std::size_t x = 0; x < a.size(); ++x) e += std::norm(a[x]) * c[x];
    return e;
}

inline double energy_expectation(const StateVector& s, const CostHamiltonian& h) {
    if (h.num_qubits() != s.num_qubits()) throw InvalidArgument("state and Hamiltonian differ in qubit count");
    return energy_expectation(s, DiagonalCost(h, s.num_qubits()));
}

inline double z_product_expectation(const StateVector& s, std::span<const Qubit> qubits) {
    for (auto q : qubits)
        if (q >= s.num_qubits()) throw InvalidArgument("qubit index out of range");
    const std::uint64_t mask = qubit_mask(qubits);
    // Spin product is (-1)^{|Q| - popcount} = sign * (-1)^popcount.
    const double sign = (qubits.size() % 2 == 0) ? 1.0 : -1.0;
    double e = 0.0;
    const auto& a = s.amplitudes();
    for (std::size_t x = 0; x < a.size(); ++x) {
        const double p = std::norm(a[x]);
        e += (std::popcount(x & mask) & 1) ? -p : p;
    }
    return sign * e;
}

inline double z_product_expectation(const StateVector& s, std::initializer_list<Qubit> qubits) {
    return z_product_expectation(s, std::span<const Qubit>(qubits.begin(), qubits.size()));
}

/// <Z_j> for every qubit in one pass.
inline std::vector<double> single_z_expectations(const StateVector& s) {
    std::vector<double> z(s.num_qubits(), 0.0);
    const auto& a = s.amplitudes();
    for (std::size_t x = 0; x < a.size(); ++x) {
        const double p = std::norm(a[x]);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += ((x >> j) & 1U) ? p : -p;
    }
    return z;
}

/// <h> of a logical term, through its base-term expansion.
inline double logical_expectation(const StateVector& s, const LogicalTerm& t) {
    double e = 0.0;
    for (const auto& b : t.expansion)
        e += b.coefficient * (b.qubits.empty() ? 1.0 : z_product_expectation(s, b.qubits));
    return e;
}

/// i.i.d. basis-state draws from |amp|^2.
inline std::vector<Assignment> sample_bitstrings(const StateVector& s, std::size_t shots, std::uint64_t seed) {
    if (shots == 0) throw InvalidArgument("need at least one shot");
    const auto& a = s.amplitudes();
    std::vector<double> cdf(a.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) cdf[x] = (acc += std::norm(a[x]));
    Rng rng(seed);
    std::vector<Assignment> out;
    out.reserve(shots);
    for (std::size_t i = 0; i < shots; ++i) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        // Skip zero-probability states sitting on the boundary.
        while (it != cdf.begin() && *(it - 1) == *it) --it;
        out.push_back(Assignment::from_index(static_cast<std::uint64_t>(it - cdf.begin()), s.num_qubits()));
    }
    return out;
}

struct GroundState {
    Assignment assignment;
    double energy = 0.0;
};

/// Exhaustive minimum; ties go to the lowest basis index.
inline GroundState brute_force_ground(const CostHamiltonian& h, std::size_t cap = kDefaultBruteForceCap) {
    if (h.num_qubits() > cap) throw ResourceError("brute force over " + std::to_string(h.num_qubits()) + " qubits exceeds the cap");
    DiagonalCost c(h, cap);
    std::size_t best = 0;
    for (std::size_t x = 1; x < c.dimension(); ++x)
        if (c[x] < c[best] - 1e-12) best = x;
    return {Assignment::from_index(best, h.num_qubits()), c[best]};
}

/// Debug dump: [{"index": x, "re": ..., "im": ...}, ...].
inline nlohmann::json amplitudes_to_json(const StateVector& s) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t x = 0; x < s.dimension(); ++x)
        out.push_back({{"index", x}, {"re", s[x].real()}, {"im", s[x].imag()}});
    return out;
}

}  // namespace iqa
