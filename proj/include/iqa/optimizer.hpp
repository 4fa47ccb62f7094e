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

// Classical outer loop for QAOA angles: grid search at p = 1, layer
// interpolation for deeper circuits, Nelder-Mead refinement throughout.

#include <functional>
#include <numbers>

#include "iqa/statevector.hpp"

namespace iqa {

struct OptimizerConfig {
    std::size_t grid_resolution = 24;   // points per axis at p = 1
    std::size_t max_iterations = 400;   // per simplex run
    std::size_t restarts = 8;           // perturbed starts per layer for p >= 2
    double tolerance = 1e-4;            // simplex size at convergence
    double beta_max = std::numbers::pi / 2;
    double gamma_max = std::numbers::pi;
    std::uint64_t seed = 0;

    void validate() const {
        if (grid_resolution < 2) throw InvalidArgument("grid resolution must be at least 2");
        if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    }
};

struct OptimizationResult {
    QaoaParams params;
    double energy = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

inline bool params_less(const QaoaParams& a, const QaoaParams& b) {
    if (a.betas != b.betas) return a.betas < b.betas;
    return a.gammas < b.gammas;
}

/// Deterministic comparison by (energy, then angles).
inline bool better(const OptimizationResult& a, const OptimizationResult& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return params_less(a.params, b.params);
}

inline QaoaParams unpack(const std::vector<double>& x) {
    const std::size_t p = x.size() / 2;
    return {std::vector<double>(x.begin(), x.begin() + p), std::vector<double>(x.begin() + p, x.end())};
}

inline std::vector<double> pack(const QaoaParams& q) {
    std::vector<double> x = q.betas;
    x.insert(x.end(), q.gammas.begin(), q.gammas.end());
    return x;
}

/// Nelder-Mead with the usual coefficients (1, 2, 1/2, 1/2). Stops when
/// every vertex is within `tol` of the best one (infinity norm).
inline std::pair<std::vector<double>, double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                                          std::vector<double> x0, const std::vector<double>& step,
                                                          double tol, std::size_t max_iter) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(d + 1);
    auto sort_vertices = [&] {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> nx(d + 1);
        std::vector<double> nf(d + 1);
        for (std::size_t i = 0; i <= d; ++i) {
            nx[i] = std::move(xs[order[i]]);
            nf[i] = fs[order[i]];
        }
        xs = std::move(nx);
        fs = std::move(nf);
    };
    auto along = [&](const std::vector<double>& c, double t) {
        std::vector<double> y(d);
        for (std::size_t i = 0; i < d; ++i) y[i] = c[i] + t * (xs[d][i] - c[i]);
        return y;
    };

    for (std::size_t it = 0; it < max_iter; ++it) {
        sort_vertices();
        double size = 0.0;
        for (std::size_t v = 1; v <= d; ++v)
            for (std::size_t i = 0; i < d; ++i) size = std::max(size, std::abs(xs[v][i] - xs[0][i]));
        if (size < tol) break;

        std::vector<double> c(d, 0.0);
        for (std::size_t v = 0; v < d; ++v)
            for (std::size_t i = 0; i < d; ++i) c[i] += xs[v][i] / static_cast<double>(d);

        auto xr = along(c, -1.0);
        const double fr = f(xr);
        if (fr < fs[0]) {
            auto xe = along(c, -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                xs[d] = std::move(xe);
                fs[d] = fe;
            } else {
                xs[d] = std::move(xr);
                fs[d] = fr;
            }
        } else if (fr < fs[d - 1]) {
            xs[d] = std::move(xr);
            fs[d] = fr;
        } else {
            const bool outside = fr < fs[d];
            auto xc = along(c, outside ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < (outside ? fr : fs[d])) {
                xs[d] = std::move(xc);
                fs[d] = fc;
            } else {
                for (std::size_t v = 1; v <= d; ++v) {
                    for (std::size_t i = 0; i < d; ++i) xs[v][i] = xs[0][i] + 0.5 * (xs[v][i] - xs[0][i]);
                    fs[v] = f(xs[v]);
                }
            }
        }
    }
    sort_vertices();
    return {xs[0], fs[0]};
}

/// Layer interpolation: p -> p + 1 angles by linear resampling of the
/// schedule, with zero padding at both ends.
inline std::vector<double> interpolate_layers(const std::vector<double>& a) {
    const std::size_t p = a.size();
    std::vector<double> out(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
        const double left = (i == 0) ? 0.0 : a[i - 1];
        const double right = (i == p) ? 0.0 : a[i];
        out[i] = (static_cast<double>(i) / p) * left + (static_cast<double>(p - i) / p) * right;
    }
    return out;
}

}  // namespace detail

/// J(beta, gamma) with a reusable state buffer.
class QaoaObjective {
public:
    explicit QaoaObjective(const DiagonalCost& cost) : cost_(cost) {}

    double operator()(const QaoaParams& params) {
        ++evaluations_;
        state_ = prepare_state(cost_, params);
        return energy_expectation(state_, cost_);
    }

    std::size_t evaluations() const { return evaluations_; }
    const DiagonalCost& cost() const { return cost_; }

private:
    const DiagonalCost& cost_;
    StateVector state_;
    std::size_t evaluations_ = 0;
};

/// The p = 1 grid: beta_i = i * beta_max / G, gamma_j = j * gamma_max / G.
inline std::vector<QaoaParams> p1_grid(const OptimizerConfig& cfg) {
    std::vector<QaoaParams> out;
    const double g = static_cast<double>(cfg.grid_resolution);
    for (std::size_t i = 0; i < cfg.grid_resolution; ++i)
        for (std::size_t j = 0; j < cfg.grid_resolution; ++j)
            out.push_back({{cfg.beta_max * i / g}, {cfg.gamma_max * j / g}});
    return out;
}

inline OptimizationResult optimize_parameters(const DiagonalCost& cost, std::size_t p, const OptimizerConfig& cfg = {}) {
    if (p == 0) throw InvalidArgument("QAOA depth must be at least 1");
    cfg.validate();
    QaoaObjective objective(cost);
    auto f = [&](const std::vector<double>& x) { return objective(detail::unpack(x)); };

    OptimizationResult best;
    bool have = false;
    for (const auto& q : p1_grid(cfg)) {
        OptimizationResult r{q, objective(q), 0};
        if (!have || detail::better(r, best)) best = r, have = true;
    }
    {
        const double g = static_cast<double>(cfg.grid_resolution);
        auto [x, e] = detail::nelder_mead(f, detail::pack(best.params), {cfg.beta_max / g / 2, cfg.gamma_max / g / 2},
                                          cfg.tolerance, cfg.max_iterations);
        OptimizationResult r{detail::unpack(x), e, 0};
        if (detail::better(r, best)) best = r;
    }

    Rng rng(mix_seed(cfg.seed, 0x9a0aULL));
    for (std::size_t layers = 2; layers <= p; ++layers) {
        QaoaParams seed{detail::interpolate_layers(best.params.betas), detail::interpolate_layers(best.params.gammas)};
        std::vector<double> step(2 * layers);
        for (std::size_t i = 0; i < layers; ++i) {
            step[i] = 0.05 * cfg.beta_max;
            step[layers + i] = 0.05 * cfg.gamma_max;
        }
        OptimizationResult layer_best{seed, objective(seed), 0};
        for (std::size_t r = 0; r <= cfg.restarts; ++r) {
            auto x0 = detail::pack(seed);
            if (r > 0)
                for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += 2.0 * step[i] * rng.normal();
            auto [x, e] = detail::nelder_mead(f, x0, step, cfg.tolerance, cfg.max_iterations);
            OptimizationResult res{detail::unpack(x), e, 0};
            if (detail::better(res, layer_best)) layer_best = res;
        }
        best = layer_best;
    }
    best.evaluations = objective.evaluations();
    return best;
}

inline OptimizationResult optimize_parameters(const CostHamiltonian& h, std::size_t p, const OptimizerConfig& cfg = {},
                                              std::size_t cap = kDefaultStateCap) {
    return optimize_parameters(DiagonalCost(h, cap), p, cfg);
}

}  // namespace iqa
