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

// DPLL with unit propagation, split-aware pure literal elimination and
// pluggable branching rules (Jeroslow-Wang, first-order, QAOA single-Z on
// the max-k-SAT Hamiltonian, and QAOA on the polarity-split encoding).

#include <chrono>
#include <numbers>
#include <optional>
#include <string>

#include "iqa/analytic.hpp"
#include "iqa/iqa_engine.hpp"

namespace iqa {

enum class BranchKind { JW, FirstOrder, Qaoa, SplitQaoa };

struct BranchingRule {
    BranchKind kind = BranchKind::JW;
    std::size_t p = 1;
    OptimizerConfig optimizer;
    /// Skip optimization and use these angles at every node.
    std::optional<QaoaParams> fixed_params;
    std::size_t qubit_cap = kDefaultStateCap;
    /// Fall back to the first-order rule when the simulator cap is exceeded.
    bool fallback = true;
    std::uint64_t seed = 0;

    static BranchingRule make(BranchKind kind, std::size_t p = 1) {
        BranchingRule r;
        r.kind = kind;
        r.p = p;
        return r;
    }
    static BranchingRule jw() { return make(BranchKind::JW); }
    static BranchingRule first_order() { return make(BranchKind::FirstOrder); }
    static BranchingRule qaoa(std::size_t p) { return make(BranchKind::Qaoa, p); }
    static BranchingRule split_qaoa(std::size_t p) { return make(BranchKind::SplitQaoa, p); }

    bool quantum() const { return kind == BranchKind::Qaoa || kind == BranchKind::SplitQaoa; }

    std::string name() const {
        switch (kind) {
            case BranchKind::JW: return "jw";
            case BranchKind::FirstOrder: return "first_order";
            case BranchKind::Qaoa: return "qaoa" + std::to_string(p);
            case BranchKind::SplitQaoa: return "split_qaoa" + std::to_string(p);
        }
        return "?";
    }

    void validate() const {
        if (quantum() && p < 1) throw InvalidArgument("quantum branching needs p >= 1");
        if (fixed_params) fixed_params->validate();
    }
};

/// Parses "jw", "first_order", "qaoa<p>", "split_qaoa<p>".
inline BranchingRule parse_branching_rule(const std::string& s) {
    if (s == "jw") return BranchingRule::jw();
    if (s == "first_order" || s == "fo") return BranchingRule::first_order();
    auto depth = [&](std::size_t prefix) {
        const auto rest = s.substr(prefix);
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
            throw InvalidArgument("bad branching rule '" + s + "'");
        return static_cast<std::size_t>(std::stoul(rest));
    };
    if (s.rfind("split_qaoa", 0) == 0) return BranchingRule::split_qaoa(depth(10));
    if (s.rfind("qaoa", 0) == 0) return BranchingRule::qaoa(depth(4));
    throw InvalidArgument("unknown branching rule '" + s + "'");
}

inline constexpr Qubit kNoPartner = static_cast<Qubit>(-1);

/// Residual formula under a partial assignment. Satisfied clauses are
/// removed and falsified literals deleted.
struct DpllState {
    std::size_t n = 0;
    std::vector<std::vector<Literal>> clauses;
    std::vector<std::int8_t> value;  // 0 = unassigned
    std::vector<Qubit> partner;      // split partner or kNoPartner
    std::vector<Literal> trail;      // literals made true, in order
    bool contradiction = false;

    static DpllState from(const CnfFormula& f) {
        f.validate();
        DpllState s;
        s.n = f.num_variables;
        s.value.assign(s.n, 0);
        s.partner.assign(s.n, kNoPartner);
        for (auto [a, b] : f.split_pairs) {
            s.partner[a] = b;
            s.partner[b] = a;
        }
        for (const auto& c : f.clauses) {
            std::vector<Literal> lits;
            bool tautology = false;
            for (const auto& l : c.literals) {
                if (std::find(lits.begin(), lits.end(), l.negated()) != lits.end()) tautology = true;
                if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
            }
            if (tautology) continue;
            if (lits.empty()) s.contradiction = true;
            s.clauses.push_back(std::move(lits));
        }
        return s;
    }

    bool is_split() const {
        return std::any_of(partner.begin(), partner.end(), [](Qubit q) { return q != kNoPartner; });
    }

    bool literal_true(Literal l) const { return value[l.variable] == (l.positive ? 1 : -1); }
    bool literal_false(Literal l) const { return value[l.variable] == (l.positive ? -1 : 1); }

    /// Make l true (and its split partner false), then simplify. Returns
    /// false on contradiction.
    bool assign(Literal l) {
        if (contradiction) return false;
        auto set = [&](Qubit v, int val) {
            if (value[v] == 0) {
                value[v] = static_cast<std::int8_t>(val);
                trail.push_back({v, val > 0});
            } else if (value[v] != val) {
                contradiction = true;
            }
        };
        const int val = l.positive ? 1 : -1;
        set(l.variable, val);
        if (partner[l.variable] != kNoPartner) set(partner[l.variable], -val);
        if (contradiction) return false;
        std::vector<std::vector<Literal>> next;
        next.reserve(clauses.size());
        for (auto& c : clauses) {
            if (std::any_of(c.begin(), c.end(), [&](Literal x) { return literal_true(x); })) continue;
            std::erase_if(c, [&](Literal x) { return literal_false(x); });
            if (c.empty()) contradiction = true;
            next.push_back(std::move(c));
        }
        clauses = std::move(next);
        return !contradiction;
    }

    /// Variables that still occur in active clauses, ascending.
    std::vector<Qubit> active_variables() const {
        std::vector<Qubit> v;
        for (const auto& c : clauses)
            for (auto l : c) v.push_back(l.variable);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

    /// The active clauses over compacted variables (order-preserving).
    std::pair<CnfFormula, std::vector<Qubit>> active_formula() const {
        auto vars = active_variables();
        CnfFormula f;
        f.num_variables = vars.size();
        for (const auto& c : clauses) {
            Clause out;
            for (auto l : c)
                out.literals.push_back(
                    {static_cast<Qubit>(std::lower_bound(vars.begin(), vars.end(), l.variable) - vars.begin()), l.positive});
            f.clauses.push_back(std::move(out));
        }
        return {std::move(f), std::move(vars)};
    }
};

/// Assign unit clauses until none remain. Returns false on contradiction.
inline bool unit_propagate(DpllState& s) {
    while (!s.contradiction) {
        auto it = std::find_if(s.clauses.begin(), s.clauses.end(), [](const auto& c) { return c.size() == 1; });
        if (it == s.clauses.end()) return true;
        if (!s.assign((*it)[0])) return false;
    }
    return false;
}

/// Assign variables that occur with one polarity only. A split variable is
/// eliminated only when its partner's occurrences agree with the pair's
/// anti-correlation; otherwise it is left alone. Returns whether anything
/// was assigned.
inline bool pure_literal_eliminate(DpllState& s) {
    bool changed = false;
    for (;;) {
        if (s.contradiction) return changed;
        std::vector<std::uint8_t> occ(s.n, 0);  // bit 0: positive, bit 1: negative
        for (const auto& c : s.clauses)
            for (auto l : c) occ[l.variable] |= l.positive ? 1 : 2;
        std::optional<Literal> pick;
        for (Qubit v = 0; v < s.n && !pick; ++v) {
            if (s.value[v] != 0 || (occ[v] != 1 && occ[v] != 2)) continue;
            const bool positive = occ[v] == 1;
            const Qubit u = s.partner[v];
            // The partner takes the opposite value, so its occurrences must
            // all have the opposite polarity.
            if (u != kNoPartner && occ[u] != 0 && occ[u] != (positive ? 2 : 1)) continue;
            pick = Literal{v, positive};
        }
        if (!pick) return changed;
        s.assign(*pick);
        changed = true;
    }
}

/// Unit propagation and pure literal elimination to a joint fixpoint.
inline bool propagate(DpllState& s) {
    do {
        if (!unit_propagate(s)) return false;
    } while (pure_literal_eliminate(s));
    return !s.contradiction;
}

// ---------------------------------------------------------------------------
// Branching rules

/// Literal maximizing sum 2^-k over active clauses containing it; ties by
/// variable index, then positive polarity.
inline Literal branch_jw(const DpllState& s) {
    std::vector<double> pos(s.n, 0.0), negs(s.n, 0.0);
    for (const auto& c : s.clauses) {
        const double w = std::ldexp(1.0, -static_cast<int>(c.size()));
        for (auto l : c) (l.positive ? pos : negs)[l.variable] += w;
    }
    std::optional<Literal> best;
    double best_score = -1.0;
    for (auto v : s.active_variables()) {
        if (pos[v] > best_score) best = Literal{v, true}, best_score = pos[v];
        if (negs[v] > best_score) best = Literal{v, false}, best_score = negs[v];
    }
    if (!best) throw InvalidArgument("no unassigned variable in an active clause");
    return *best;
}

/// Variable maximizing |sum_{+} 2^-k - sum_{-} 2^-k|, branched toward the
/// sign of that sum (positive on zero); ties by lowest index.
inline Literal branch_first_order(const DpllState& s) {
    std::vector<double> c(s.n, 0.0);
    for (const auto& cl : s.clauses) {
        const double w = std::ldexp(1.0, -static_cast<int>(cl.size()));
        for (auto l : cl) c[l.variable] += l.positive ? w : -w;
    }
    std::optional<Literal> best;
    double best_score = -1.0;
    for (auto v : s.active_variables())
        if (std::abs(c[v]) > best_score) best = Literal{v, c[v] >= 0.0}, best_score = std::abs(c[v]);
    if (!best) throw InvalidArgument("no unassigned variable in an active clause");
    return *best;
}

namespace detail {

inline std::uint64_t trail_seed(std::uint64_t seed, const DpllState& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto l : s.trail) {
        h ^= (static_cast<std::uint64_t>(l.variable) << 1) | (l.positive ? 1U : 0U);
        h *= 0x100000001b3ULL;
    }
    return mix_seed(seed, h);
}

inline std::vector<double> qaoa_z(const CostHamiltonian& h, const BranchingRule& rule, std::uint64_t node_seed) {
    const DiagonalCost diag(h, rule.qubit_cap);
    QaoaParams params;
    if (rule.fixed_params) {
        params = *rule.fixed_params;
    } else {
        auto cfg = rule.optimizer;
        cfg.seed = node_seed;
        params = optimize_parameters(diag, rule.p, cfg).params;
    }
    return single_z_expectations(prepare_state(diag, params));
}

}  // namespace detail

/// QAOA on the unweighted max-k-SAT Hamiltonian of the active clauses; the
/// variable with the largest |<Z_j>| is branched toward the sign of <Z_j>.
inline Literal branch_qaoa(const DpllState& s, const BranchingRule& rule) {
    auto [f, vars] = s.active_formula();
    if (vars.empty()) throw InvalidArgument("no unassigned variable in an active clause");
    if (vars.size() > rule.qubit_cap) throw ResourceError("active formula needs " + std::to_string(vars.size()) + " qubits");
    const auto z = detail::qaoa_z(sat_hamiltonian(f, false), rule, detail::trail_seed(rule.seed, s));
    const auto c = select_single_z(z);
    return {vars[c.variable], c.sign > 0};
}

/// QAOA on the polarity-split encoding of the active clauses. Split qubit
/// q < n' stands for +x_q and q >= n' for -x_{q-n'}; the selected literal is
/// made true first when its qubit's <Z> is positive, false otherwise.
inline Literal branch_split_qaoa(const DpllState& s, const BranchingRule& rule) {
    if (s.is_split()) throw InvalidArgument("formula is already polarity-split");
    auto [f, vars] = s.active_formula();
    if (vars.empty()) throw InvalidArgument("no unassigned variable in an active clause");
    if (2 * vars.size() > rule.qubit_cap)
        throw ResourceError("split formula needs " + std::to_string(2 * vars.size()) + " qubits");
    const auto split = split_polarity_transform(f, false);
    const auto z = detail::qaoa_z(split.hamiltonian, rule, detail::trail_seed(rule.seed, s));
    const auto c = select_single_z(z);
    const std::size_t n = vars.size();
    const Literal lit = c.variable < n ? Literal{vars[c.variable], true} : Literal{vars[c.variable - n], false};
    return c.sign > 0 ? lit : lit.negated();
}

struct BranchDecision {
    Literal literal;
    bool fallback = false;
};

inline BranchDecision choose_branch(const DpllState& s, const BranchingRule& rule) {
    switch (rule.kind) {
        case BranchKind::JW: return {branch_jw(s)};
        case BranchKind::FirstOrder: return {branch_first_order(s)};
        case BranchKind::Qaoa:
        case BranchKind::SplitQaoa:
            try {
                return {rule.kind == BranchKind::Qaoa ? branch_qaoa(s, rule) : branch_split_qaoa(s, rule)};
            } catch (const ResourceError&) {
                if (!rule.fallback) throw;
                return {branch_first_order(s), true};
            }
    }
    throw InternalError("unknown branching rule");
}

// ---------------------------------------------------------------------------
// Solver

struct DpllResult {
    bool satisfiable = false;
    Assignment assignment;  // valid when satisfiable
    std::size_t branch_points = 0;
    bool fallback_used = false;
    std::size_t fallback_count = 0;
    double wall_time_ms = 0.0;
};

namespace detail {

struct DpllSearch {
    const BranchingRule& rule;
    DpllResult& result;

    bool run(DpllState s) {
        if (!propagate(s)) return false;
        if (s.clauses.empty()) {
            result.assignment = complete(s);
            return true;
        }
        const auto d = choose_branch(s, rule);
        ++result.branch_points;
        if (d.fallback) {
            result.fallback_used = true;
            ++result.fallback_count;
        }
        for (Literal l : {d.literal, d.literal.negated()}) {
            DpllState child = s;
            if (child.assign(l) && run(std::move(child))) return true;
        }
        return false;
    }

    /// Unassigned variables default to false; an unassigned split pair gets
    /// its first member true.
    static Assignment complete(const DpllState& s) {
        Assignment a(s.n);
        for (Qubit v = 0; v < s.n; ++v) {
            int val = s.value[v];
            if (val == 0) {
                const Qubit u = s.partner[v];
                val = (u == kNoPartner) ? -1 : (s.value[u] != 0 ? -s.value[u] : (v < u ? 1 : -1));
            }
            a.set(v, val);
        }
        return a;
    }
};

}  // namespace detail

inline bool satisfies(const CnfFormula& f, const Assignment& a) {
    return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) {
        return std::any_of(c.literals.begin(), c.literals.end(),
                           [&](Literal l) { return a[l.variable] == (l.positive ? 1 : -1); });
    });
}

inline DpllResult solve(const CnfFormula& f, const BranchingRule& rule = BranchingRule::jw()) {
    rule.validate();
    const auto start = std::chrono::steady_clock::now();
    DpllResult result;
    auto s = DpllState::from(f);
    detail::DpllSearch search{rule, result};
    result.satisfiable = !s.contradiction && search.run(std::move(s));
    if (result.satisfiable) {
        if (!satisfies(f, result.assignment)) throw InternalError("DPLL returned an assignment that violates a clause");
        for (auto [a, b] : f.split_pairs)
            if (result.assignment[a] == result.assignment[b]) throw InternalError("DPLL violated a split pair");
    } else {
        result.assignment = Assignment();
    }
    result.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace iqa
