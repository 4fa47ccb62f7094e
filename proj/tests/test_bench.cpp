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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "iqa/bench.hpp"

using namespace iqa;
using namespace iqa::bench;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("iqa_bench_test_" + name);
    fs::remove_all(p);
    return p;
}

CorpusSpec spec(Experiment e, std::size_t n, std::size_t instances, std::optional<double> density = {}) {
    CorpusSpec s;
    s.experiment = e;
    s.n = n;
    s.k = 3;
    s.density = density;
    s.instances = instances;
    s.seed = 7;
    return s;
}

std::string strip_last_column(const std::string& csv) {
    std::string out, line;
    std::istringstream in(csv);
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

#ifdef IQA_BENCH_EXE
int run_cli(const std::string& args) {
    const int status = std::system((std::string(IQA_BENCH_EXE) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

}  // namespace

TEST(Summary, MeanAndSem) {
    const std::vector<double> xs{1.0, 2.0, 3.0};
    const auto s = summarize(xs);
    EXPECT_EQ(s.count, 3u);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_NEAR(s.sem, 1.0 / std::sqrt(3.0), 1e-15);
    const std::vector<double> same{4.0, 4.0, 4.0, 4.0};
    EXPECT_EQ(summarize(same).sem, 0.0);
    EXPECT_EQ(summarize(std::vector<double>{}).count, 0u);
}

TEST(Summary, Properties) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> xs(1 + rng.below(20));
        for (auto& x : xs) x = rng.below(3) ? rng.uniform(-5, 5) : 1.0;
        const auto s = summarize(xs);
        const double mx = *std::max_element(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        EXPECT_LE(std::abs(s.mean), std::abs(mx) + 1e-12);
        const bool all_equal = std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; });
        EXPECT_EQ(s.sem == 0.0, all_equal);
    }
}

TEST(ParallelMap, OrderedAndErrorsPropagate) {
    const auto v = parallel_map(100, [](std::size_t i) { return i * i; }, 4);
    for (std::size_t i = 0; i < 100; ++i) ASSERT_EQ(v[i], i * i);
    EXPECT_THROW(parallel_map(10, [](std::size_t i) { if (i == 7) throw ResourceError("x"); return i; }, 3), ResourceError);
}

TEST(Corpus, ClauseCounts) {
    const auto x = make_corpus(spec(Experiment::XorsatIqa, 10, 3, 1.0));
    for (const auto& inst : x) {
        EXPECT_EQ(inst.m, 10u);
        EXPECT_EQ(inst.hamiltonian.logical_terms().size(), 10u);
        EXPECT_FALSE(inst.formula);
    }
    const auto k = make_corpus(spec(Experiment::DpllBench, 15, 2));
    for (const auto& inst : k) {
        EXPECT_EQ(inst.m, 83u);
        EXPECT_EQ(inst.formula->clauses.size(), 83u);
    }
    EXPECT_EQ(spec(Experiment::DpllBench, 13, 1).clause_count(), 72u);
    EXPECT_EQ(spec(Experiment::DpllBench, 8, 1).clause_count(), 44u);
}

TEST(Corpus, DeterministicAndDistinct) {
    const auto s = spec(Experiment::KsatIqa, 10, 5);
    const auto a = make_corpus(s), b = make_corpus(s);
    EXPECT_EQ(corpus_hash(a), corpus_hash(b));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].serialized(), b[i].serialized());
    EXPECT_NE(a[0].serialized(), a[1].serialized());
    auto other = s;
    other.seed = 8;
    EXPECT_NE(corpus_hash(make_corpus(other)), corpus_hash(a));
    EXPECT_THROW(make_corpus(spec(Experiment::DpllBench, 10, 0)), InvalidArgument);
}

TEST(Corpus, WriteIsByteIdenticalAndLoadsBack) {
    for (auto e : {Experiment::DpllBench, Experiment::KsatIqa, Experiment::XorsatIqa}) {
        const auto s = spec(e, 8, 4, e == Experiment::XorsatIqa ? std::optional<double>(1.0) : std::nullopt);
        const auto corpus = make_corpus(s);
        const auto d1 = scratch("w1"), d2 = scratch("w2");
        write_corpus(d1, s, corpus);
        write_corpus(d2, s, make_corpus(s));
        for (const auto& entry : fs::directory_iterator(d1))
            EXPECT_EQ(read_file(entry.path()), read_file(d2 / entry.path().filename())) << entry.path();
        const auto m = nlohmann::json::parse(read_file(d1 / "manifest.json"));
        EXPECT_EQ(m["seed"], 7);
        EXPECT_EQ(m["instances"].size(), 4u);
        EXPECT_EQ(m["corpus_hash"], hex64(corpus_hash(corpus)));

        const auto loaded = load_corpus(d1);
        ASSERT_EQ(loaded.instances.size(), corpus.size());
        EXPECT_EQ(corpus_hash(loaded.instances), corpus_hash(corpus));
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            EXPECT_EQ(loaded.instances[i].seed, corpus[i].seed);
            for (std::uint64_t x = 0; x < 256; x += 17) {
                const auto a = Assignment::from_index(x, 8);
                EXPECT_NEAR(evaluate(loaded.instances[i].hamiltonian, a), evaluate(corpus[i].hamiltonian, a), 1e-12);
            }
        }
        // a tampered file is rejected
        std::ofstream(d1 / instance_filename(corpus[0]), std::ios::app) << "c tampered\n";
        EXPECT_THROW(load_corpus(d1), Error);
        fs::remove_all(d1);
        fs::remove_all(d2);
    }
    EXPECT_THROW(load_corpus(scratch("missing")), Error);
}

TEST(DpllBench, RowAccountingAndPairing) {
    const auto corpus = make_corpus(spec(Experiment::DpllBench, 8, 50));
    const std::vector<BranchingRule> rules{BranchingRule::jw(), BranchingRule::first_order(), BranchingRule::qaoa(1),
                                           BranchingRule::qaoa(2)};
    const auto rows = run_dpll(corpus, rules, 1);
    ASSERT_EQ(rows.size(), 200u);
    const auto agg = aggregate<DpllRow>("dpll_bench", rows, "branch_points", [](const DpllRow& r) { return r.rule; },
                                        [](const DpllRow& r) { return double(r.branch_points); });
    ASSERT_EQ(agg.size(), 4u);
    for (const auto& a : agg) EXPECT_EQ(a.summary.count, 50u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].instance_id, i / 4);
        EXPECT_EQ(rows[i].satisfiable, rows[i - i % 4].satisfiable);
        EXPECT_FALSE(rows[i].fallback_used);
    }
    const auto csv = dpll_csv(rows).str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "instance_id,rule,n,k,m,decision,branch_points,fallback_used,wall_time_ms");
    // rerunning reproduces every column but the timing, whatever the worker count
    EXPECT_EQ(strip_last_column(dpll_csv(run_dpll(corpus, rules, 2)).str()), strip_last_column(csv));
}

TEST(IqaBench, SingleClauseRatioOne) {
    Instance inst;
    inst.n = 1;
    inst.k = 1;
    inst.m = 1;
    inst.formula = CnfFormula{1, {Clause{{pos(0)}, 1.0}}, {}};
    inst.hamiltonian = sat_hamiltonian(*inst.formula);
    IqaBenchConfig cfg;
    cfg.stop_threshold = 1;
    const auto rows = run_iqa_method(inst, IqaMethod::SingleZ, cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].ratio, 1.0);
    EXPECT_TRUE(rows[0].optimal());
}

TEST(IqaBench, RowsAndReproducibility) {
    const auto corpus = make_corpus(spec(Experiment::XorsatIqa, 7, 3, 1.0));
    const std::vector<IqaMethod> methods{IqaMethod::SingleZ, IqaMethod::LogicalTerm, IqaMethod::BaseQaoa};
    IqaBenchConfig cfg;
    cfg.p = 1;
    cfg.stop_threshold = 3;
    cfg.keep_traces = true;
    const auto rows = run_iqa_bench(corpus, methods, cfg, 1);
    ASSERT_EQ(rows.size(), 12u);
    for (const auto& r : rows) {
        EXPECT_GT(r.ratio, 0.0);
        EXPECT_LE(r.ratio, 1.0 + 1e-12);
        EXPECT_EQ(r.trace.has_value(), r.method == "single_z" || r.method == "logical_term");
    }
    for (std::size_t i = 0; i < rows.size(); i += 4)
        EXPECT_LE(rows[i + 2].ratio, rows[i + 3].ratio + 1e-12);  // expected <= best sample
    EXPECT_EQ(strip_last_column(iqa_csv(rows).str()), strip_last_column(iqa_csv(run_iqa_bench(corpus, methods, cfg, 3)).str()));
    EXPECT_EQ(parse_iqa_method("logical_term"), IqaMethod::LogicalTerm);
    EXPECT_THROW(parse_iqa_method("magic"), InvalidArgument);
}

TEST(VerifyAnalytic, SmallSweepPasses) {
    VerifyConfig cfg;
    cfg.instances = 6;
    cfg.grid = 3;
    const auto report = verify_analytic(cfg);
    ASSERT_EQ(report.size(), 4u);
    for (const auto& r : report) {
        EXPECT_TRUE(r.passed()) << r.check;
        EXPECT_GT(r.cases, 0u);
    }
    EXPECT_TRUE(report[3].informational);
    EXPECT_GT(report[3].max_error, 1e-2);
}

TEST(Experiment, Names) {
    for (auto e : {Experiment::XorsatIqa, Experiment::KsatIqa, Experiment::DpllBench, Experiment::AnalyticVerify})
        EXPECT_EQ(parse_experiment(to_string(e)), e);
    EXPECT_THROW(parse_experiment("fig9"), InvalidArgument);
}

#ifdef IQA_BENCH_EXE
TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli("generate --n 6 --k 3 --critical --instances 2 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_EQ(run_cli("dpll --corpus " + dir.string() + " --rules jw,qaoa --p 1 --out " + (dir / "d.csv").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "d_summary.csv"));
    EXPECT_EQ(run_cli("verify-analytic --instances 2 --grid 2"), 0);
    EXPECT_EQ(run_cli("dpll --rules nonsense --n 5 --instances 1"), 4);
    EXPECT_EQ(run_cli("dpll --density 2 --critical"), 4);
    EXPECT_EQ(run_cli("dpll --corpus " + (dir / "absent").string()), 4);
    EXPECT_EQ(run_cli("iqa --n 8 --instances 1 --cap 4"), 3);
    EXPECT_EQ(run_cli(""), 4);
    EXPECT_EQ(run_cli("--help"), 0);
    fs::remove_all(dir);
}
#endif
