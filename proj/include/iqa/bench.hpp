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

// Experiment plumbing: seeded corpora with manifests, paired runs over a
// worker pool, CSV rows and mean/SEM aggregates.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "iqa/dimacs.hpp"
#include "iqa/dpll.hpp"
#include "iqa/generators.hpp"
#include "iqa/iqa_engine.hpp"
#include "iqa/serialization.hpp"

namespace iqa::bench {

// ---------------------------------------------------------------------------
// Statistics

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double sem = 0.0;  // sample standard deviation / sqrt(count)
};

inline Summary summarize(std::span<const double> xs) {
    Summary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sem = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
    }
    return s;
}

inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << x;
    return o.str();
}

/// Runs fn(i) for i in [0, count) on `workers` threads; results land in
/// index order whatever the scheduling.
template <class Fn>
auto parallel_map(std::size_t count, Fn fn, std::size_t workers = 0) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<std::optional<R>> slots(count);
    if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i; (i = next++) < count;) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Instance protocols

enum class Experiment { XorsatIqa, KsatIqa, DpllBench, AnalyticVerify };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::XorsatIqa: return "xorsat_iqa";
        case Experiment::KsatIqa: return "ksat_iqa";
        case Experiment::DpllBench: return "dpll_bench";
        case Experiment::AnalyticVerify: return "analytic_verify";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    if (s == "xorsat_iqa") return Experiment::XorsatIqa;
    if (s == "ksat_iqa") return Experiment::KsatIqa;
    if (s == "dpll_bench") return Experiment::DpllBench;
    if (s == "analytic_verify") return Experiment::AnalyticVerify;
    throw InvalidArgument("unknown experiment '" + s + "'");
}

struct CorpusSpec {
    Experiment experiment = Experiment::DpllBench;
    std::size_t n = 8;
    std::size_t k = 3;
    std::optional<double> density;  // m = round(density * n); critical count when absent
    std::size_t instances = 50;
    std::uint64_t seed = 1;

    std::size_t clause_count() const {
        if (density) return static_cast<std::size_t>(std::llround(*density * static_cast<double>(n)));
        return critical_clause_count(n, k);
    }

    bool weighted() const { return experiment == Experiment::KsatIqa; }
    bool xorsat() const { return experiment == Experiment::XorsatIqa; }

    void validate() const {
        if (instances < 1) throw InvalidArgument("instance count must be at least 1");
        if (n < 1 || k < 1 || k > n) throw InvalidArgument("need 1 <= k <= n");
        if (density && !(*density > 0.0)) throw InvalidArgument("density must be positive");
    }

    std::uint64_t instance_seed(std::size_t i) const { return mix_seed(seed, {n, k, clause_count(), i}); }

    nlohmann::json to_json() const {
        nlohmann::json j{{"experiment", to_string(experiment)}, {"n", n}, {"k", k}, {"m", clause_count()},
                         {"instances", instances}, {"seed", seed}};
        j["density"] = density ? nlohmann::json(*density) : nlohmann::json("critical");
        return j;
    }
};

struct Instance {
    std::size_t id = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0, k = 0, m = 0;
    std::optional<CnfFormula> formula;  // SAT instances
    CostHamiltonian hamiltonian;        // always set

    std::string serialized() const { return formula ? write_dimacs(*formula) : write_hamiltonian_json(hamiltonian) + "\n"; }
    std::string extension() const { return formula ? (std::any_of(formula->clauses.begin(), formula->clauses.end(), [](const Clause& c) { return c.weight != 1.0; }) ? ".wcnf" : ".cnf") : ".json"; }
};

inline Instance make_instance(const CorpusSpec& spec, std::size_t i) {
    Instance inst;
    inst.id = i;
    inst.seed = spec.instance_seed(i);
    inst.n = spec.n;
    inst.k = spec.k;
    inst.m = spec.clause_count();
    if (spec.xorsat()) {
        inst.hamiltonian = gen_random_xorsat(spec.n, spec.k, inst.m, inst.seed);
    } else {
        inst.formula = gen_random_ksat(spec.n, spec.k, inst.m, spec.weighted(), inst.seed);
        inst.hamiltonian = sat_hamiltonian(*inst.formula, true);
    }
    return inst;
}

inline std::vector<Instance> make_corpus(const CorpusSpec& spec) {
    spec.validate();
    std::vector<Instance> out;
    for (std::size_t i = 0; i < spec.instances; ++i) out.push_back(make_instance(spec, i));
    return out;
}

/// Hash of the whole instance set, used to confirm paired runs.
inline std::uint64_t corpus_hash(std::span<const Instance> corpus) {
    std::string all;
    for (const auto& i : corpus) all += hex64(fnv1a(i.serialized()));
    return fnv1a(all);
}

inline std::string instance_filename(const Instance& inst) {
    std::ostringstream o;
    o << "instance_" << std::setw(4) << std::setfill('0') << inst.id << inst.extension();
    return o.str();
}

inline nlohmann::json manifest(const CorpusSpec& spec, std::span<const Instance> corpus) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& inst : corpus)
        items.push_back({{"id", inst.id}, {"file", instance_filename(inst)}, {"seed", inst.seed},
                         {"hash", hex64(fnv1a(inst.serialized()))}});
    return {{"seed", spec.seed}, {"config", spec.to_json()}, {"instances", std::move(items)},
            {"corpus_hash", hex64(corpus_hash(corpus))}};
}

inline void write_corpus(const std::filesystem::path& dir, const CorpusSpec& spec, std::span<const Instance> corpus) {
    std::filesystem::create_directories(dir);
    for (const auto& inst : corpus) {
        std::ofstream out(dir / instance_filename(inst), std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / instance_filename(inst)).string());
        out << inst.serialized();
    }
    std::ofstream m(dir / "manifest.json", std::ios::binary);
    if (!m) throw Error("cannot write manifest in " + dir.string());
    m << manifest(spec, corpus).dump(2) << "\n";
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct LoadedCorpus {
    CorpusSpec spec;
    std::vector<Instance> instances;
};

/// Reads a corpus directory, checking every file against its manifest hash.
inline LoadedCorpus load_corpus(const std::filesystem::path& dir) {
    if (!std::filesystem::exists(dir / "manifest.json")) throw Error("no corpus manifest in " + dir.string());
    const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
    LoadedCorpus c;
    const auto& cfg = m.at("config");
    c.spec.experiment = parse_experiment(cfg.at("experiment").get<std::string>());
    c.spec.n = cfg.at("n").get<std::size_t>();
    c.spec.k = cfg.at("k").get<std::size_t>();
    c.spec.instances = cfg.at("instances").get<std::size_t>();
    c.spec.seed = m.at("seed").get<std::uint64_t>();
    if (cfg.at("density").is_number()) c.spec.density = cfg.at("density").get<double>();
    for (const auto& item : m.at("instances")) {
        const auto text = read_file(dir / item.at("file").get<std::string>());
        if (hex64(fnv1a(text)) != item.at("hash").get<std::string>())
            throw Error("hash mismatch for " + item.at("file").get<std::string>());
        Instance inst;
        inst.id = item.at("id").get<std::size_t>();
        inst.seed = item.at("seed").get<std::uint64_t>();
        inst.n = c.spec.n;
        inst.k = c.spec.k;
        inst.m = c.spec.clause_count();
        if (c.spec.xorsat()) {
            inst.hamiltonian = xorsat_from_base(read_hamiltonian_json(text));
        } else {
            inst.formula = parse_dimacs(text);
            inst.hamiltonian = sat_hamiltonian(*inst.formula, true);
        }
        c.instances.push_back(std::move(inst));
    }
    return c;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double x) {
    if (std::isnan(x)) return "";
    return detail::format_double(x);
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw InternalError("CSV row width mismatch");
        rows_.push_back(std::move(row));
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
            out += "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

    void write(const std::filesystem::path& p) const {
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error("cannot write " + p.string());
        out << str();
    }

    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------------------
// DPLL benchmark

struct DpllRow {
    std::size_t instance_id;
    std::string rule;
    std::size_t n, k, m;
    bool satisfiable;
    std::size_t branch_points;
    bool fallback_used;
    double wall_time_ms;
};

inline const std::vector<std::string>& dpll_header() {
    static const std::vector<std::string> h{"instance_id", "rule", "n", "k", "m", "decision", "branch_points", "fallback_used", "wall_time_ms"};
    return h;
}

/// Every rule on every instance; rows ordered instance-major.
inline std::vector<DpllRow> run_dpll(std::span<const Instance> corpus, std::span<const BranchingRule> rules,
                                     std::size_t workers = 0) {
    const std::size_t R = rules.size();
    return parallel_map(corpus.size() * R, [&](std::size_t idx) {
        const auto& inst = corpus[idx / R];
        auto rule = rules[idx % R];
        rule.seed = mix_seed(inst.seed, 0xd011ULL);
        const auto res = solve(*inst.formula, rule);
        return DpllRow{inst.id, rule.name(), inst.n, inst.k, inst.m, res.satisfiable, res.branch_points, res.fallback_used, res.wall_time_ms};
    }, workers);
}

inline CsvWriter dpll_csv(std::span<const DpllRow> rows) {
    CsvWriter w(dpll_header());
    for (const auto& r : rows)
        w.add({std::to_string(r.instance_id), r.rule, std::to_string(r.n), std::to_string(r.k), std::to_string(r.m),
               r.satisfiable ? "SAT" : "UNSAT", std::to_string(r.branch_points), r.fallback_used ? "1" : "0",
               csv_number(r.wall_time_ms)});
    return w;
}

// ---------------------------------------------------------------------------
// IQA benchmark

enum class IqaMethod { SingleZ, LogicalTerm, BaseQaoa };

inline std::string to_string(IqaMethod m) {
    switch (m) {
        case IqaMethod::SingleZ: return "single_z";
        case IqaMethod::LogicalTerm: return "logical_term";
        case IqaMethod::BaseQaoa: return "base_qaoa";
    }
    return "?";
}

inline IqaMethod parse_iqa_method(const std::string& s) {
    if (s == "single_z") return IqaMethod::SingleZ;
    if (s == "logical_term") return IqaMethod::LogicalTerm;
    if (s == "base_qaoa") return IqaMethod::BaseQaoa;
    throw InvalidArgument("unknown IQA method '" + s + "'");
}

struct IqaRow {
    std::size_t instance_id;
    std::string method;  // base_qaoa yields base_qaoa_expected and base_qaoa_best
    std::size_t n, k, m;
    double energy;
    double ground_energy;
    double ratio;
    std::size_t iterations;
    std::string status;
    double wall_time_ms;
    std::optional<nlohmann::json> trace;

    bool optimal() const { return std::abs(energy - ground_energy) < 1e-9; }
};

inline const std::vector<std::string>& iqa_header() {
    static const std::vector<std::string> h{"instance_id", "method", "n", "k", "m", "energy", "ground_energy", "ratio", "optimal", "iterations", "status", "wall_time_ms"};
    return h;
}

struct IqaBenchConfig {
    std::size_t p = 2;
    OptimizerConfig optimizer;
    std::size_t shots = 0;          // 0 = exact expectation values in the IQA loop
    std::size_t base_samples = 1024;
    std::size_t stop_threshold = 6;
    std::size_t state_cap = kDefaultStateCap;
    bool keep_traces = false;
};

inline std::vector<IqaRow> run_iqa_method(const Instance& inst, IqaMethod method, const IqaBenchConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count(); };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (method == IqaMethod::BaseQaoa) {
        auto ocfg = cfg.optimizer;
        ocfg.seed = mix_seed(inst.seed, 0xba5eULL);
        const auto r = run_base_qaoa(inst.hamiltonian, cfg.p, ocfg, cfg.base_samples, mix_seed(inst.seed, 0x5a3bULL),
                                     kDefaultBruteForceCap, cfg.state_cap);
        const double g = r.ground_energy.value_or(nan);
        const double t = elapsed();
        return {IqaRow{inst.id, "base_qaoa_expected", inst.n, inst.k, inst.m, r.optimum.energy, g, r.expected_ratio.value_or(nan), 0, "completed", t, {}},
                IqaRow{inst.id, "base_qaoa_best", inst.n, inst.k, inst.m, r.best_sample_energy, g, r.best_sample_ratio.value_or(nan), 0, "completed", t, {}}};
    }
    IqaConfig ic;
    ic.rule = method == IqaMethod::SingleZ ? SelectionRule::SingleZ : SelectionRule::LogicalTerm;
    ic.p = cfg.p;
    ic.optimizer = cfg.optimizer;
    ic.shots = cfg.shots;
    ic.stop_threshold = cfg.stop_threshold;
    ic.state_cap = cfg.state_cap;
    ic.seed = mix_seed(inst.seed, 0x1c0aULL);
    const auto tr = run_iqa(inst.hamiltonian, ic);
    IqaRow row{inst.id, to_string(method), inst.n, inst.k, inst.m, tr.energy, tr.ground_energy.value_or(nan),
               tr.ratio.value_or(nan), tr.iterations.size(),
               tr.status == IqaStatus::Completed ? "completed" : "infeasible_branch", elapsed(), {}};
    if (cfg.keep_traces) row.trace = tr.to_json();
    return {row};
}

inline std::vector<IqaRow> run_iqa_bench(std::span<const Instance> corpus, std::span<const IqaMethod> methods,
                                         const IqaBenchConfig& cfg, std::size_t workers = 0) {
    const std::size_t M = methods.size();
    auto chunks = parallel_map(corpus.size() * M, [&](std::size_t idx) {
        return run_iqa_method(corpus[idx / M], methods[idx % M], cfg);
    }, workers);
    std::vector<IqaRow> out;
    for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
    return out;
}

inline CsvWriter iqa_csv(std::span<const IqaRow> rows) {
    CsvWriter w(iqa_header());
    for (const auto& r : rows)
        w.add({std::to_string(r.instance_id), r.method, std::to_string(r.n), std::to_string(r.k), std::to_string(r.m),
               csv_number(r.energy), csv_number(r.ground_energy), csv_number(r.ratio), r.optimal() ? "1" : "0",
               std::to_string(r.iterations), r.status, csv_number(r.wall_time_ms)});
    return w;
}

// ---------------------------------------------------------------------------
// Aggregates

struct AggregateRow {
    std::string experiment;
    std::size_t n, k;
    std::string key;  // rule or method
    std::string metric;
    Summary summary;
};

inline const std::vector<std::string>& aggregate_header() {
    static const std::vector<std::string> h{"experiment", "n", "k", "key", "metric", "count", "mean", "sem"};
    return h;
}

/// Groups by key in first-appearance order.
template <class Row, class KeyFn, class ValueFn>
std::vector<AggregateRow> aggregate(const std::string& experiment, std::span<const Row> rows, const std::string& metric,
                                    KeyFn key, ValueFn value) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> groups;
    std::map<std::string, std::pair<std::size_t, std::size_t>> nk;
    for (const auto& r : rows) {
        const std::string kk = key(r);
        const double v = value(r);
        if (std::isnan(v)) continue;
        if (!groups.count(kk)) order.push_back(kk);
        groups[kk].push_back(v);
        nk[kk] = {r.n, r.k};
    }
    std::vector<AggregateRow> out;
    for (const auto& kk : order)
        out.push_back({experiment, nk[kk].first, nk[kk].second, kk, metric, summarize(groups[kk])});
    return out;
}

inline CsvWriter aggregate_csv(std::span<const AggregateRow> rows) {
    CsvWriter w(aggregate_header());
    for (const auto& r : rows)
        w.add({r.experiment, std::to_string(r.n), std::to_string(r.k), r.key, r.metric, std::to_string(r.summary.count),
               csv_number(r.summary.mean), csv_number(r.summary.sem)});
    return w;
}

// ---------------------------------------------------------------------------
// Analytic verification

struct VerifyRow {
    std::string check;
    std::size_t cases = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool informational = false;

    bool passed() const { return informational || max_error < tolerance; }
};

struct VerifyConfig {
    std::size_t n_min = 4, n_max = 10;
    std::vector<std::size_t> ks{2, 3};
    std::size_t instances = 50;
    std::size_t grid = 5;  // grid x grid (beta, gamma) points
    std::uint64_t seed = 1;
    double tolerance = 1e-8;
};

/// Random max-k-SAT or max-k-XORSAT instance for verification sweeps.
inline CostHamiltonian verify_instance(const VerifyConfig& cfg, std::size_t i) {
    const auto s = mix_seed(cfg.seed, {0xa11aULL, i});
    Rng rng(s);
    const std::size_t k = cfg.ks[rng.below(cfg.ks.size())];
    const std::size_t n = std::max(k, cfg.n_min + static_cast<std::size_t>(rng.below(cfg.n_max - cfg.n_min + 1)));
    if (i % 2 == 0) {
        const std::size_t m = std::max<std::size_t>(1, n + rng.below(2 * n));
        return sat_hamiltonian(gen_random_ksat(n, k, m, true, mix_seed(s, 1)));
    }
    const std::size_t m = std::min<std::size_t>(binomial(n, k), n);
    return gen_random_xorsat(n, k, m, mix_seed(s, 2));
}

inline std::vector<std::pair<double, double>> verify_grid(std::size_t g) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b)
            pts.emplace_back((a + 0.5) * (std::numbers::pi / 2) / g, (b + 0.5) * std::numbers::pi / g);
    return pts;
}

inline std::vector<VerifyRow> verify_analytic(const VerifyConfig& cfg) {
    VerifyRow single{"single_z_p1 vs statevector", 0, 0.0, cfg.tolerance};
    VerifyRow corr{"correlator_p1 vs statevector", 0, 0.0, cfg.tolerance};
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        const auto h = verify_instance(cfg, i);
        const DiagonalCost diag(h);
        for (auto [b, g] : verify_grid(cfg.grid)) {
            const auto s = prepare_state(diag, QaoaParams{{b}, {g}});
            const auto z = single_z_expectations(s);
            for (Qubit j = 0; j < h.num_qubits(); ++j) {
                single.max_error = std::max(single.max_error, std::abs(single_z_p1(h, j, b, g) - z[j]));
                ++single.cases;
            }
            for (const auto& t : h.terms()) {
                corr.max_error = std::max(corr.max_error, std::abs(correlator_p1(h, t.qubits, b, g) - z_product_expectation(s, t.qubits)));
                ++corr.cases;
            }
        }
    }

    VerifyRow two{"two_local_single_z vs single_z_p1", 0, 0.0, 1e-12};
    VerifyRow printed{"printed two-local form vs single_z_p1", 0, 0.0, 0.0, true};
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        Rng rng(mix_seed(cfg.seed, {0xc2ULL, i}));
        const std::size_t n = 2 + rng.below(11);
        std::vector<BaseTerm> terms;
        for (Qubit a = 0; a < n; ++a) {
            terms.push_back({{a}, rng.uniform(-1.0, 1.0)});
            for (Qubit b = a + 1; b < n; ++b)
                if (rng.uniform() < 0.4) terms.push_back({{a, b}, rng.uniform(-1.0, 1.0)});
        }
        const auto h = CostHamiltonian::from_base(n, terms);
        for (auto [b, g] : verify_grid(cfg.grid))
            for (Qubit j = 0; j < n; ++j) {
                const double ref = single_z_p1(h, j, b, g);
                two.max_error = std::max(two.max_error, std::abs(two_local_single_z(h, j, b, g) - ref));
                printed.max_error = std::max(printed.max_error, std::abs(two_local_single_z_printed(h, j, b, g) - ref));
                ++two.cases;
                ++printed.cases;
            }
    }
    return {single, corr, two, printed};
}

}  // namespace iqa::bench
