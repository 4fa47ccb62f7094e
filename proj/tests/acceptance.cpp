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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "iqa.hpp"
#include "oracles.hpp"

using namespace iqa;
using namespace iqa::bench;

namespace {

// Pinned tolerances and thresholds.
constexpr double kAnalyticTol = 1e-8;
constexpr double kAnalyticSeconds = 120.0;
constexpr double kTwoLocalTol = 1e-12;
constexpr double kSmallGamma = 1e-4;
constexpr double kSmallBeta = std::numbers::pi / 8;
constexpr double kTieGap = 1e-6;
constexpr double kReductionFraction = 0.95;
constexpr double kDpllSeconds = 1800.0;
constexpr std::size_t kSplitQubitCap = 16;
constexpr double kOptimalFraction = 0.90;
constexpr double kWeightTol = 1e-9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Clock {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool distinct_top(std::vector<double> v) {
    for (auto& x : v) x = std::abs(x);
    std::sort(v.rbegin(), v.rend());
    return v.size() < 2 || v[0] - v[1] > kTieGap;
}

BranchingRule small_gamma(BranchingRule r) {
    r.fixed_params = QaoaParams{{kSmallBeta}, {kSmallGamma}};
    return r;
}

// Paired-sample comparison uses the combined standard error of both means.
double combined_sem(const Summary& a, const Summary& b) { return std::sqrt(a.sem * a.sem + b.sem * b.sem); }

std::vector<double> branch_points(const std::vector<DpllRow>& rows, const std::string& rule) {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.rule == rule) out.push_back(static_cast<double>(r.branch_points));
    return out;
}

// ---------------------------------------------------------------------------

VerifyConfig analytic_config() {
    VerifyConfig cfg;
    cfg.n_min = 4;
    cfg.n_max = 10;
    cfg.ks = {2, 3};
    cfg.instances = 50;
    cfg.grid = 5;
    cfg.seed = 2026;
    cfg.tolerance = kAnalyticTol;
    return cfg;
}

Outcome ac1() {
    Clock clock;
    const auto rows = verify_analytic(analytic_config());
    const double t = clock.seconds();
    const auto& r = rows[0];
    return {r.max_error < kAnalyticTol && t < kAnalyticSeconds,
            fmt("single-Z closed form vs statevector: max error %.3g (tol %.0e) over %zu cases, %.1f s (limit %.0f s)",
                r.max_error, kAnalyticTol, r.cases, t, kAnalyticSeconds)};
}

Outcome ac2() {
    const auto rows = verify_analytic(analytic_config());
    const auto& r = rows[1];
    return {r.max_error < kAnalyticTol,
            fmt("term correlator vs statevector: max error %.3g (tol %.0e) over %zu cases", r.max_error, kAnalyticTol, r.cases)};
}

Outcome ac3() {
    const auto rows = verify_analytic(analytic_config());
    const auto& two = rows[2];
    const auto& printed = rows[3];
    return {two.max_error < kTwoLocalTol,
            fmt("corrected 2-local form: max error %.3g (tol %.0e) over %zu cases; printed form max error %.3g (informational)",
                two.max_error, kTwoLocalTol, two.cases, printed.max_error)};
}

Outcome ac4() {
    constexpr std::size_t n = 10, k = 3, instances = 100;
    const std::size_t m = critical_clause_count(n, k);
    std::size_t tie_free = 0, agree = 0, polarity = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const auto f = gen_random_ksat(n, k, m, false, mix_seed(0xac4ULL, i));
        const auto s = DpllState::from(f);
        std::vector<double> c;
        for (Qubit v = 0; v < n; ++v) c.push_back(first_order_coeff(f, v));
        if (!distinct_top(c)) continue;
        ++tie_free;
        const Literal q = branch_qaoa(s, small_gamma(BranchingRule::qaoa(1)));
        const Literal r = branch_first_order(s);
        agree += q.variable == r.variable;
        polarity += q == r;
    }
    const double frac = tie_free ? static_cast<double>(agree) / tie_free : 0.0;
    return {tie_free > 0 && frac >= kReductionFraction,
            fmt("QAOA-1 single-Z argmax = first-order argmax on %zu/%zu tie-free instances (%.1f%%, need %.0f%%); same literal on %zu; n=%zu m=%zu",
                agree, tie_free, 100 * frac, 100 * kReductionFraction, polarity, n, m)};
}

Outcome ac5() {
    constexpr std::size_t k = 3, instances = 100;
    std::size_t tie_free = 0, agree = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t n = 6 + i % 3;
        const auto f = gen_random_ksat(n, k, critical_clause_count(n, k), false, mix_seed(0xac5ULL, i));
        const auto s = DpllState::from(f);
        std::vector<double> jw;
        for (Qubit v = 0; v < n; ++v) {
            jw.push_back(jw_score(f, pos(v)));
            jw.push_back(jw_score(f, neg(v)));
        }
        if (!distinct_top(jw)) continue;
        ++tie_free;
        agree += branch_split_qaoa(s, small_gamma(BranchingRule::split_qaoa(1))) == branch_jw(s);
    }
    const double frac = tie_free ? static_cast<double>(agree) / tie_free : 0.0;
    return {tie_free > 0 && frac >= kReductionFraction,
            fmt("split QAOA-1 literal = JW literal on %zu/%zu tie-free instances (%.1f%%, need %.0f%%); n=6..8",
                agree, tie_free, 100 * frac, 100 * kReductionFraction)};
}

Outcome ac6() {
    Clock clock;
    constexpr std::size_t instances = 200;
    std::vector<BranchingRule> rules{BranchingRule::jw(), BranchingRule::first_order(), BranchingRule::qaoa(1),
                                     BranchingRule::split_qaoa(1)};
    rules[3].qubit_cap = kSplitQubitCap;
    std::size_t wrong = 0, sat = 0, fallback_runs = 0, fallback_nodes = 0, split_nodes = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        Rng rng(mix_seed(0xac6ULL, i));
        const std::size_t k = 2 + i % 2;
        const std::size_t n = 3 + rng.below(10);
        const double ratio = (k == 2 ? 1.0 : 4.27) * rng.uniform(0.5, 1.5);
        const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ratio * n)));
        const auto f = gen_random_ksat(n, k, m, false, rng.next_u64());
        const bool truth = oracle::brute_force_sat(f).has_value();
        sat += truth;
        for (auto rule : rules) {
            rule.seed = mix_seed(0xd011ULL, i);
            const auto r = solve(f, rule);
            if (r.satisfiable != truth) {
                ++wrong;
                std::printf("  AC6 mismatch: instance %zu rule %s n=%zu m=%zu\n", i, rule.name().c_str(), n, m);
            }
            if (rule.kind == BranchKind::SplitQaoa) {
                fallback_runs += r.fallback_used;
                fallback_nodes += r.fallback_count;
                split_nodes += r.branch_points;
            }
        }
    }
    const double t = clock.seconds();
    return {wrong == 0 && t < kDpllSeconds,
            fmt("%zu disagreements with brute force over %zu instances x 4 rules (%zu SAT); split fallback on %zu/%zu nodes in %zu runs; %.0f s (limit %.0f s)",
                wrong, instances, sat, fallback_nodes, split_nodes, fallback_runs, t, kDpllSeconds)};
}

Outcome ac7() {
    CorpusSpec spec;
    spec.n = 13;
    spec.k = 3;
    spec.instances = 50;
    spec.seed = 7;
    const auto corpus = make_corpus(spec);
    const std::vector<BranchingRule> rules{BranchingRule::jw(), BranchingRule::first_order()};
    const auto rows = run_dpll(corpus, rules);
    const auto jw = summarize(branch_points(rows, "jw"));
    const auto fo = summarize(branch_points(rows, "first_order"));
    const double sem = combined_sem(jw, fo);
    return {jw.mean <= fo.mean + sem,
            fmt("mean branch points JW %.2f (sem %.2f) <= first-order %.2f (sem %.2f) + %.2f; n=13 m=%zu, %zu instances",
                jw.mean, jw.sem, fo.mean, fo.sem, sem, spec.clause_count(), spec.instances)};
}

Outcome ac8() {
    Clock clock;
    CorpusSpec spec;
    spec.n = 8;
    spec.k = 3;
    spec.instances = 50;
    spec.seed = 8;
    const auto corpus = make_corpus(spec);
    const std::vector<BranchingRule> rules{BranchingRule::jw(), BranchingRule::split_qaoa(1)};
    const auto rows = run_dpll(corpus, rules);
    const auto jw = summarize(branch_points(rows, "jw"));
    const auto sq = summarize(branch_points(rows, "split_qaoa1"));
    const double sem = combined_sem(jw, sq);
    const double diff = std::abs(sq.mean - jw.mean);
    return {diff <= 2 * sem,
            fmt("|split QAOA-1 %.2f - JW %.2f| = %.2f <= 2 x %.2f; n=8 m=%zu, %zu instances, %.0f s",
                sq.mean, jw.mean, diff, sem, spec.clause_count(), spec.instances, clock.seconds())};
}

Outcome ac9() {
    Clock clock;
    bool ok = true;
    std::string detail;
    const std::vector<IqaMethod> methods{IqaMethod::LogicalTerm, IqaMethod::SingleZ, IqaMethod::BaseQaoa};
    for (std::size_t n : {8, 10, 12}) {
        CorpusSpec spec;
        spec.experiment = Experiment::XorsatIqa;
        spec.n = n;
        spec.k = 3;
        spec.density = 1.0;
        spec.instances = 50;
        spec.seed = 9;
        IqaBenchConfig cfg;
        cfg.p = 2;
        const auto rows = run_iqa_bench(make_corpus(spec), methods, cfg);
        std::map<std::string, std::vector<double>> ratios;
        for (const auto& r : rows) ratios[r.method].push_back(r.ratio);
        const auto lt = summarize(ratios["logical_term"]);
        const auto sz = summarize(ratios["single_z"]);
        const auto base = summarize(ratios["base_qaoa_expected"]);
        ok = ok && lt.mean >= sz.mean && sz.mean >= base.mean;
        detail += fmt("n=%zu: logical %.4f >= single %.4f >= base %.4f; ", n, lt.mean, sz.mean, base.mean);
    }
    return {ok, detail + fmt("%.0f s", clock.seconds())};
}

Outcome ac10() {
    constexpr std::size_t sets = 500;
    Rng rng(0xac10ULL);
    std::size_t mismatches = 0, contradictions = 0, findings = 0, max_component = 0, pigeon_checks = 0, pigeon_diff = 0;
    for (std::size_t i = 0; i < sets; ++i) {
        const std::size_t n = 3 + rng.below(6);
        const auto cs = oracle::random_constraint_set(n, 1 + rng.below(2 * n), rng);
        std::vector<LogicalTerm> candidates;
        for (const auto& c : cs.constraints) {
            candidates.push_back(c.term);
            const auto s = c.term.support();
            if (s.size() >= 2) {
                auto t = encode_xorsat_term({s[0], s[1]}, 1.0);
                t.id = 1000 + candidates.size();
                candidates.push_back(t);
            }
        }
        for (const auto& comp : connected_components(cs)) {
            max_component = std::max(max_component, comp.variables.size());
            const auto M = enumerate_satisfying(cs, comp, kDefaultComponentCap);
            ++pigeon_checks;
            if (infer_correlations(M) != infer_correlations(M, {.full_scan = true})) ++pigeon_diff;
        }
        const auto got = run_inference(cs, candidates);
        const auto want = oracle::brute_infer(cs, candidates);
        bool same = got.contradiction == want.contradiction && got.deferred.empty();
        if (same && !want.contradiction) {
            std::map<std::size_t, double> w;
            for (const auto& t : want.fixed_terms) w[t.id] = t.value;
            same = got.fixed == want.fixed && got.correlated == want.correlated &&
                   got.fixed_terms.size() == want.fixed_terms.size();
            for (const auto& t : got.fixed_terms)
                if (!w.count(t.id) || std::abs(w[t.id] - t.value) > 1e-9) same = false;
        }
        mismatches += !same;
        contradictions += want.contradiction;
        findings += !got.empty();
    }
    return {mismatches == 0 && pigeon_diff == 0 && max_component <= 8,
            fmt("%zu/%zu sets differ from exhaustive checker (%zu with findings, %zu contradictory, largest component %zu); "
                "shortcut vs full scan differs on %zu/%zu components",
                mismatches, sets, findings, contradictions, max_component, pigeon_diff, pigeon_checks)};
}

Outcome ac11() {
    Clock clock;
    CorpusSpec spec;
    spec.experiment = Experiment::KsatIqa;
    spec.n = 10;
    spec.k = 3;
    spec.instances = 50;
    spec.seed = 11;
    const auto corpus = make_corpus(spec);
    std::size_t optimal = 0;
    for (const auto& inst : corpus) {
        IqaConfig ic;
        ic.rule = SelectionRule::SingleZ;
        ic.p = 2;
        ic.seed = mix_seed(inst.seed, 0x1c0aULL);
        const auto tr = run_iqa(inst.hamiltonian, ic);
        const auto& f = *inst.formula;
        double best = 0.0;
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << f.num_variables); ++x)
            best = std::max(best, oracle::satisfied_weight(f, x));
        double got = 0.0;
        for (const auto& c : f.clauses)
            if (std::any_of(c.literals.begin(), c.literals.end(),
                            [&](Literal l) { return tr.assignment[l.variable] == (l.positive ? 1 : -1); }))
                got += c.weight;
        optimal += got >= best - kWeightTol;
    }
    const double frac = static_cast<double>(optimal) / corpus.size();
    return {frac >= kOptimalFraction,
            fmt("single-Z IQA (p=2) reaches the optimal satisfied weight on %zu/%zu instances (%.0f%%, need %.0f%%); n=10 m=%zu, %.0f s",
                optimal, corpus.size(), 100 * frac, 100 * kOptimalFraction, spec.clause_count(), clock.seconds())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11};
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::strtoul(argv[i], nullptr, 10));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && !selected.count(i + 1)) continue;
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("AC%zu %s %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
