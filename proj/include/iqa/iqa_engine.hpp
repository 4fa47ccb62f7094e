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

// Iterative quantum algorithm: prepare a QAOA state on the (penalized)
// problem, select one feature from its expectation values, reduce the
// problem, repeat; brute-force the residual and unwind the reductions.

#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "iqa/inference.hpp"
#include "iqa/optimizer.hpp"

namespace iqa {

enum class SelectionRule { SingleZ, LogicalTerm };

inline const char* to_string(SelectionRule r) { return r == SelectionRule::SingleZ ? "single_z" : "logical_term"; }

struct IqaConfig {
    SelectionRule rule = SelectionRule::SingleZ;
    std::size_t p = 2;
    OptimizerConfig optimizer;
    std::optional<double> lambda;  // penalty multiplier; default 2 sum|c| + 1 each iteration
    std::size_t stop_threshold = 6;
    std::uint64_t seed = 0;
    std::size_t shots = 0;  // 0 = exact expectation values
    std::size_t state_cap = kDefaultStateCap;
    std::size_t oracle_cap = kDefaultBruteForceCap;
    bool compute_ratio = true;
    InferenceOptions inference;

    void validate() const {
        if (stop_threshold < 1) throw InvalidArgument("stop threshold must be at least 1");
        if (lambda && !(*lambda > 0.0)) throw InvalidArgument("penalty multiplier must be positive");
        if (p < 1) throw InvalidArgument("QAOA depth must be at least 1");
    }
};

enum class RecordKind { Fix, Correlate, Elevate };

/// One reduction, in original variable indices.
struct ReductionRecord {
    RecordKind kind = RecordKind::Fix;
    Qubit variable = 0;  // fixed or eliminated variable
    Qubit partner = 0;   // kept variable of a correlation
    int sign = 1;
    std::size_t term_id = 0;  // elevated or inferred-fixed term
    double value = 0.0;       // its recorded value
    bool inferred = false;    // produced by inference rather than selection
    std::vector<Qubit> live_before;  // current -> original map before the action
};

struct IqaIteration {
    std::string rule;
    std::string feature;
    double expectation = 0.0;
    std::size_t n_free = 0;
    std::size_t rejected = 0;  // candidates rolled back on contradiction
};

enum class IqaStatus { Completed, InfeasibleBranch };

struct IqaTrace {
    std::vector<IqaIteration> iterations;
    std::vector<ReductionRecord> records;
    Assignment assignment;
    double energy = 0.0;
    std::optional<double> ground_energy;
    std::optional<double> ratio;
    IqaStatus status = IqaStatus::Completed;
    double credited = 0.0;
    bool constraints_satisfied = true;

    nlohmann::json to_json() const {
        nlohmann::json it = nlohmann::json::array();
        for (const auto& i : iterations)
            it.push_back({{"rule", i.rule}, {"feature", i.feature}, {"expectation", i.expectation}, {"n_free", i.n_free}});
        std::vector<int> a(assignment.values().begin(), assignment.values().end());
        nlohmann::json j{{"iterations", std::move(it)}, {"assignment", a}, {"energy", energy},
                         {"status", status == IqaStatus::Completed ? "completed" : "infeasible_branch"}};
        j["ratio"] = ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr);
        return j;
    }
};

// ---------------------------------------------------------------------------
// Selection

namespace detail {

/// Magnitudes equal to 1e-12 count as ties.
inline long long rank_key(double x) { return std::llround(x * 1e12); }

inline int sign_with_zero_positive(double x) { return rank_key(x) < 0 ? -1 : 1; }

}  // namespace detail

struct SingleZChoice {
    Qubit variable;
    int sign;
    double expectation;
};

/// Variables by decreasing |<Z_j>|, lowest index first among ties.
inline std::vector<SingleZChoice> rank_single_z(const std::vector<double>& z) {
    std::vector<SingleZChoice> out;
    for (Qubit j = 0; j < z.size(); ++j) out.push_back({j, detail::sign_with_zero_positive(z[j]), z[j]});
    std::stable_sort(out.begin(), out.end(), [](const SingleZChoice& a, const SingleZChoice& b) {
        return detail::rank_key(std::abs(a.expectation)) > detail::rank_key(std::abs(b.expectation));
    });
    return out;
}

inline SingleZChoice select_single_z(const std::vector<double>& z) {
    if (z.empty()) throw InvalidArgument("no free variables to select");
    return rank_single_z(z).front();
}

inline SingleZChoice select_single_z(const StateVector& s) { return select_single_z(single_z_expectations(s)); }

struct TermChoice {
    std::size_t id;
    double target;
    double expectation;
};

/// +-1 terms rank by |<h>| with target sgn<h> (zero -> +1); 0/1 terms rank by
/// <h> with target 1. Weights play no part. Ties go to the lowest id.
inline std::vector<TermChoice> rank_logical_terms(const CostHamiltonian& h, const std::vector<double>& expectations) {
    std::vector<TermChoice> out;
    for (std::size_t i = 0; i < h.logical_terms().size(); ++i) {
        const auto& t = h.logical_terms()[i];
        const double e = expectations.at(i);
        if (t.domain == ValueDomain::PlusMinusOne)
            out.push_back({t.id, static_cast<double>(detail::sign_with_zero_positive(e)), e});
        else
            out.push_back({t.id, 1.0, e});
    }
    auto score = [&](const TermChoice& c) {
        const auto* t = h.find_logical(c.id);
        return detail::rank_key(t->domain == ValueDomain::PlusMinusOne ? std::abs(c.expectation) : c.expectation);
    };
    std::sort(out.begin(), out.end(), [&](const TermChoice& a, const TermChoice& b) {
        const auto sa = score(a), sb = score(b);
        return sa != sb ? sa > sb : a.id < b.id;
    });
    return out;
}

inline std::vector<double> logical_expectations(const CostHamiltonian& h, const StateVector& s) {
    std::vector<double> e;
    for (const auto& t : h.logical_terms()) e.push_back(logical_expectation(s, t));
    return e;
}

inline TermChoice select_logical_term(const CostHamiltonian& h, const StateVector& s) {
    if (h.logical_terms().empty()) throw InvalidArgument("no logical terms to select");
    return rank_logical_terms(h, logical_expectations(h, s)).front();
}

// ---------------------------------------------------------------------------
// Penalties

/// 2 sum|c_a| + 1 over the cost part.
inline double default_lambda(const CostHamiltonian& h) { return 2.0 * h.total_abs_coefficient() + 1.0; }

/// Violation-penalizing form of each constraint: lambda (1 - s h)/2 for +-1
/// terms and lambda (t + (1 - 2t) h) for 0/1 terms with target t.
inline CostHamiltonian assemble_penalized(const CostHamiltonian& h, std::span<const Constraint> cs, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("penalty multiplier must be positive");
    if (cs.empty()) return h;
    std::vector<BaseTerm> pen;
    for (const auto& c : cs) {
        double k0, k1;
        if (c.term.domain == ValueDomain::PlusMinusOne) {
            k0 = lambda / 2.0;
            k1 = -lambda * c.required_value / 2.0;
        } else {
            k0 = lambda * c.required_value;
            k1 = lambda * (1.0 - 2.0 * c.required_value);
        }
        pen.push_back({{}, k0});
        for (const auto& b : c.term.expansion) pen.push_back({b.qubits, k1 * b.coefficient});
    }
    return h.with_extra(pen);
}

// ---------------------------------------------------------------------------
// Engine state and reductions

struct IqaState {
    std::size_t n_original = 0;
    CostHamiltonian h;                     // current cost part, current indices
    std::vector<Constraint> constraints;   // current indices
    std::vector<Qubit> live;               // current index -> original variable
    std::vector<ReductionRecord> records;
    double credited = 0.0;                 // -w * value of every removed term

    explicit IqaState(CostHamiltonian h0 = {}) : n_original(h0.num_qubits()), h(std::move(h0)) {
        live.resize(n_original);
        std::iota(live.begin(), live.end(), Qubit{0});
    }

    std::size_t num_free() const { return h.num_qubits(); }

    Qubit current_index(Qubit original) const {
        auto it = std::find(live.begin(), live.end(), original);
        if (it == live.end()) throw InternalError("variable is no longer live");
        return static_cast<Qubit>(it - live.begin());
    }

    ConstraintSet constraint_set() const { return {h.num_qubits(), constraints}; }
};

namespace detail {

/// Substitute into h and every constraint. False if a constraint became a
/// violated constant.
inline bool apply_substitution(IqaState& st, const SubstitutionAction& action) {
    auto sub = substitute(st.h, action);
    std::vector<Constraint> kept;
    for (const auto& c : st.constraints) {
        Constraint nc{substitute(c.term, action, sub.index_map), c.required_value};
        if (nc.term.is_constant()) {
            if (std::abs(nc.term.constant_part() - nc.required_value) >= 1e-9) return false;
            continue;
        }
        kept.push_back(std::move(nc));
    }
    std::vector<Qubit> live(sub.index_map.new_size);
    for (std::size_t j = 0; j < st.live.size(); ++j)
        if (sub.index_map.old_to_new[j] != IndexMap::kEliminated) live[sub.index_map.old_to_new[j]] = st.live[j];
    st.h = std::move(sub.hamiltonian);
    st.constraints = std::move(kept);
    st.live = std::move(live);
    return true;
}

}  // namespace detail

inline bool apply_fix(IqaState& st, Qubit original, int sign, bool inferred) {
    ReductionRecord r;
    r.kind = RecordKind::Fix;
    r.variable = original;
    r.sign = sign;
    r.inferred = inferred;
    r.live_before = st.live;
    if (!detail::apply_substitution(st, Fix{st.current_index(original), sign})) return false;
    st.records.push_back(std::move(r));
    return true;
}

/// z_eliminated = sign * z_kept, both original indices.
inline bool apply_correlate(IqaState& st, Qubit eliminated, Qubit kept, int sign, bool inferred) {
    ReductionRecord r;
    r.kind = RecordKind::Correlate;
    r.variable = eliminated;
    r.partner = kept;
    r.sign = sign;
    r.inferred = inferred;
    r.live_before = st.live;
    if (!detail::apply_substitution(st, Correlate{st.current_index(eliminated), st.current_index(kept), sign})) return false;
    st.records.push_back(std::move(r));
    return true;
}

/// Remove a live logical term, crediting -w * value.
inline void remove_term(IqaState& st, std::size_t id, double value, bool inferred) {
    auto [h2, w] = st.h.without_logical(id);
    ReductionRecord r;
    r.kind = RecordKind::Elevate;
    r.term_id = id;
    r.value = value;
    r.inferred = inferred;
    r.live_before = st.live;
    st.records.push_back(std::move(r));
    st.credited += -w * value;
    st.h = std::move(h2);
}

/// Run inference to a fixpoint, applying everything it finds. False on
/// contradiction; `st` is then unspecified.
inline bool infer_cascade(IqaState& st, const InferenceOptions& opt, InferenceResult* last = nullptr) {
    for (;;) {
        if (st.constraints.empty()) return true;
        auto res = run_inference(st.constraint_set(), st.h.logical_terms(), opt);
        if (last) *last = res;
        if (res.contradiction) return false;
        if (res.empty()) return true;
        for (const auto& ft : res.fixed_terms) remove_term(st, ft.id, ft.value, true);
        // Convert to original indices before the first substitution moves anything.
        std::vector<std::pair<Qubit, int>> fixes;
        for (const auto& f : res.fixed) fixes.emplace_back(st.live[f.variable], f.sign);
        std::vector<CorrelatedPair> pairs;
        for (const auto& c : res.correlated) pairs.push_back({st.live[c.r], st.live[c.s], c.sign});
        for (auto [v, s] : fixes)
            if (!apply_fix(st, v, s, true)) return false;
        // Union-find with parity over this batch; the later variable of two
        // roots is eliminated.
        std::map<Qubit, std::pair<Qubit, int>> alias;
        auto resolve = [&](Qubit x) {
            int s = 1;
            for (auto it = alias.find(x); it != alias.end(); it = alias.find(x)) {
                s *= it->second.second;
                x = it->second.first;
            }
            return std::pair{x, s};
        };
        for (const auto& c : pairs) {
            auto [a, sa] = resolve(c.r);
            auto [b, sb] = resolve(c.s);
            if (a == b) {
                if (sa * sb != c.sign) return false;
                continue;
            }
            const int sign = c.sign * sa * sb;  // z_a = sign * z_b
            const Qubit ia = st.current_index(a), ib = st.current_index(b);
            const Qubit elim = ia > ib ? a : b, keep = ia > ib ? b : a;
            if (!apply_correlate(st, elim, keep, sign, true)) return false;
            alias[elim] = {keep, sign};
        }
    }
}

/// Elevate live term `id` to a constraint with value `target`, then infer.
/// Works on a copy: `st` changes only on success.
inline bool elevate_and_infer(IqaState& st, std::size_t id, double target, const InferenceOptions& opt = {},
                              InferenceResult* result = nullptr) {
    IqaState work = st;
    const auto* t = work.h.find_logical(id);
    if (!t) throw InvalidArgument("selected term is not live");
    Constraint c{*t, target};
    remove_term(work, id, target, false);
    work.constraints.push_back(std::move(c));
    if (!infer_cascade(work, opt, result)) return false;
    st = std::move(work);
    return true;
}

/// Fix a variable by selection and propagate through the constraints.
inline bool fix_and_infer(IqaState& st, Qubit original, int sign, const InferenceOptions& opt = {}) {
    IqaState work = st;
    if (!apply_fix(work, original, sign, false)) return false;
    if (!infer_cascade(work, opt)) return false;
    st = std::move(work);
    return true;
}

// ---------------------------------------------------------------------------
// Unwinding

/// Back-substitutes records in reverse order on top of the residual values
/// of the still-live original variables.
inline Assignment unwind(std::span<const ReductionRecord> records, std::size_t n, std::span<const Qubit> residual_vars,
                         const Assignment& residual) {
    if (residual_vars.size() != residual.size()) throw InvalidArgument("residual assignment length mismatch");
    std::vector<int> v(n, 0);
    for (std::size_t i = 0; i < residual_vars.size(); ++i) v.at(residual_vars[i]) = residual[i];
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        if (it->kind == RecordKind::Fix) {
            if (v.at(it->variable) != 0) throw InternalError("fixed variable assigned twice");
            v[it->variable] = it->sign;
        } else if (it->kind == RecordKind::Correlate) {
            if (v.at(it->variable) != 0 || v.at(it->partner) == 0) throw InternalError("inconsistent correlation record");
            v[it->variable] = it->sign * v[it->partner];
        }
    }
    Assignment a(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (v[j] == 0) throw InternalError("variable left unassigned by unwinding");
        a.set(j, v[j]);
    }
    return a;
}

// ---------------------------------------------------------------------------
// The loop

/// Minimum of h over assignments satisfying every constraint (lowest index
/// on ties). Empty if no assignment satisfies them.
inline std::optional<GroundState> constrained_ground(const CostHamiltonian& h, std::span<const Constraint> cs,
                                                     std::size_t cap = kDefaultBruteForceCap) {
    DiagonalCost diag(h, cap);
    std::optional<GroundState> best;
    std::optional<std::uint64_t> best_x;
    for (std::uint64_t x = 0; x < diag.dimension(); ++x) {
        if (best_x && !(diag[x] < diag[*best_x] - 1e-12)) continue;
        const auto a = Assignment::from_index(x, h.num_qubits());
        if (std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return c.satisfied_by(a); })) best_x = x;
    }
    if (best_x) best = GroundState{Assignment::from_index(*best_x, h.num_qubits()), diag[*best_x]};
    return best;
}

class IqaEngine {
public:
    IqaEngine(const CostHamiltonian& h0, IqaConfig cfg) : h0_(h0), cfg_(std::move(cfg)), st_(h0) { cfg_.validate(); }

    const IqaState& state() const { return st_; }
    const IqaConfig& config() const { return cfg_; }
    const std::vector<IqaIteration>& iterations() const { return iterations_; }
    bool infeasible() const { return infeasible_; }
    bool done() const { return infeasible_ || st_.num_free() <= cfg_.stop_threshold; }

    /// One prepare-select-reduce iteration. False when every candidate led to
    /// a contradiction.
    bool step() {
        const double lambda = cfg_.lambda.value_or(default_lambda(st_.h));
        const auto pen = assemble_penalized(st_.h, st_.constraints, lambda);
        const DiagonalCost diag(pen, cfg_.state_cap);
        auto ocfg = cfg_.optimizer;
        ocfg.seed = mix_seed(cfg_.seed, iterations_.size());
        const auto opt = optimize_parameters(diag, cfg_.p, ocfg);
        const auto state = prepare_state(diag, opt.params);
        std::optional<std::vector<Assignment>> samples;
        if (cfg_.shots > 0) samples = sample_bitstrings(state, cfg_.shots, mix_seed(cfg_.seed, {iterations_.size(), 0x5a5aULL}));

        IqaIteration rec;
        rec.n_free = st_.num_free();
        if (cfg_.rule == SelectionRule::LogicalTerm && !st_.h.logical_terms().empty()) {
            rec.rule = to_string(SelectionRule::LogicalTerm);
            std::vector<double> e;
            if (samples) {
                for (const auto& t : st_.h.logical_terms()) {
                    double s = 0.0;
                    for (const auto& a : *samples) s += evaluate(t, a);
                    e.push_back(s / static_cast<double>(samples->size()));
                }
            } else {
                e = logical_expectations(st_.h, state);
            }
            for (const auto& c : rank_logical_terms(st_.h, e)) {
                if (elevate_and_infer(st_, c.id, c.target, cfg_.inference)) {
                    rec.feature = "term " + std::to_string(c.id) + " = " + std::to_string(static_cast<int>(c.target));
                    rec.expectation = c.expectation;
                    iterations_.push_back(rec);
                    return true;
                }
                ++rec.rejected;
            }
        } else {
            rec.rule = cfg_.rule == SelectionRule::SingleZ ? "single_z" : "single_z_fallback";
            std::vector<double> z;
            if (samples) {
                z.assign(st_.num_free(), 0.0);
                for (const auto& a : *samples)
                    for (std::size_t j = 0; j < z.size(); ++j) z[j] += a[j];
                for (auto& x : z) x /= static_cast<double>(samples->size());
            } else {
                z = single_z_expectations(state);
            }
            auto ranked = rank_single_z(z);
            const std::size_t first = ranked.size();
            for (std::size_t i = 0; i < first; ++i) ranked.push_back({ranked[i].variable, -ranked[i].sign, ranked[i].expectation});
            for (const auto& c : ranked) {
                const Qubit orig = st_.live[c.variable];
                if (fix_and_infer(st_, orig, c.sign, cfg_.inference)) {
                    rec.feature = "z" + std::to_string(orig) + " = " + (c.sign > 0 ? "+1" : "-1");
                    rec.expectation = c.expectation;
                    iterations_.push_back(rec);
                    return true;
                }
                ++rec.rejected;
            }
        }
        infeasible_ = true;
        return false;
    }

    IqaTrace finish() {
        IqaTrace tr;
        tr.iterations = iterations_;
        tr.status = infeasible_ ? IqaStatus::InfeasibleBranch : IqaStatus::Completed;
        auto residual = constrained_ground(st_.h, st_.constraints, cfg_.oracle_cap);
        if (!residual) {
            tr.constraints_satisfied = false;
            const double lambda = cfg_.lambda.value_or(default_lambda(st_.h));
            residual = brute_force_ground(assemble_penalized(st_.h, st_.constraints, lambda), cfg_.oracle_cap);
        }
        tr.records = st_.records;
        tr.credited = st_.credited;
        tr.assignment = unwind(st_.records, st_.n_original, st_.live, residual->assignment);
        tr.energy = evaluate(h0_, tr.assignment);
        if (cfg_.compute_ratio && h0_.num_qubits() <= cfg_.oracle_cap) {
            tr.ground_energy = brute_force_ground(h0_, cfg_.oracle_cap).energy;
            if (*tr.ground_energy != 0.0) tr.ratio = tr.energy / *tr.ground_energy;
        }
        return tr;
    }

private:
    CostHamiltonian h0_;
    IqaConfig cfg_;
    IqaState st_;
    std::vector<IqaIteration> iterations_;
    bool infeasible_ = false;
};

inline IqaTrace run_iqa(const CostHamiltonian& h0, const IqaConfig& cfg) {
    if (h0.num_qubits() < 1) throw InvalidArgument("problem has no variables");
    IqaEngine engine(h0, cfg);
    while (!engine.done()) engine.step();
    return engine.finish();
}

struct BaseQaoaResult {
    OptimizationResult optimum;
    double best_sample_energy = 0.0;
    std::optional<double> ground_energy;
    std::optional<double> expected_ratio;
    std::optional<double> best_sample_ratio;
};

/// Plain QAOA-p on the whole problem: expected energy of the optimized state
/// and the best of `shots` samples.
inline BaseQaoaResult run_base_qaoa(const CostHamiltonian& h0, std::size_t p, const OptimizerConfig& cfg = {},
                                    std::size_t shots = 1024, std::uint64_t seed = 0,
                                    std::size_t oracle_cap = kDefaultBruteForceCap,
                                    std::size_t state_cap = kDefaultStateCap) {
    BaseQaoaResult r;
    const DiagonalCost diag(h0, state_cap);
    r.optimum = optimize_parameters(diag, p, cfg);
    const auto state = prepare_state(diag, r.optimum.params);
    r.best_sample_energy = std::numeric_limits<double>::infinity();
    for (const auto& a : sample_bitstrings(state, shots, seed)) r.best_sample_energy = std::min(r.best_sample_energy, diag[a.to_index()]);
    if (h0.num_qubits() <= oracle_cap) {
        r.ground_energy = brute_force_ground(h0, oracle_cap).energy;
        if (*r.ground_energy != 0.0) {
            r.expected_ratio = r.optimum.energy / *r.ground_energy;
            r.best_sample_ratio = r.best_sample_energy / *r.ground_energy;
        }
    }
    return r;
}

}  // namespace iqa
