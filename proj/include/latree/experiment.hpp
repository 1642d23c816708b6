#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "latree/corrupt.hpp"
#include "latree/estimate.hpp"
#include "latree/io.hpp"
#include "latree/model.hpp"
#include "latree/reconstruct.hpp"
#include "latree/rf.hpp"

namespace latree {

/// The seeded protocol: per trial, sample, corrupt, estimate distances both
/// robustly and plainly, reconstruct with every configured learner, score
/// against the ground truth.
struct ExperimentConfig {
    Archetype archetype = Archetype::hmm;
    int size_param = 4;
    int m = 3;
    double rho_edge = 0.24;
    int l_max = 1;
    double alpha = 1.0;

    std::vector<int> sample_counts = {1000};
    bool corrupt_enabled = false;
    CorruptionPattern pattern = CorruptionPattern::constant_magnitude;
    int corruption_n1 = 0;
    double amplitude = 60.0;
    double alt_rho_scale = 2.0;    // alternate model for the model-based patterns
    double alt_value_scale = 1.0;  // node scale of the alternate (ties it to the amplitude)

    std::vector<std::string> algorithms = {"clrg"};
    RgConfig rg;
    int trials = 1;
    std::uint64_t base_seed = 1;
    int estimator_n1 = 0;

    std::string csv_path;
    std::string summary_path;
    int jobs = 1;
    bool record_timing = false;  // off: wall_ms column written as zero for reproducible files
};

struct ReportRow {
    int trial = 0;
    std::string algorithm;
    bool robust = false;
    int n = 0;
    int n1 = 0;
    int rf = 0;
    bool exact = false;
    double wall_ms = 0;
    bool failed = false;
};

struct ReportAggregate {
    std::string algorithm;
    bool robust = false;
    int n = 0;
    int trials = 0;
    int failures = 0;
    double mean_rf = 0;
    double std_rf = 0;
    double std_over_mean = 0;
    double exact_rate = 0;
};

struct Report {
    std::vector<ReportRow> rows;
    std::vector<ReportAggregate> aggregates;
};

namespace detail {

// corruption stream is decoupled from the sampling stream
constexpr std::uint64_t kCorruptionSeedXor = 0x5DEECE66Dull;

inline LearnedTree run_learner(const std::string& name, const DistanceMatrix& D,
                               const RgConfig& cfg) {
    if (name == "rg") return rg_learn(D, cfg);
    if (name == "nj") return nj_learn(D);
    if (name == "snj") return snj_learn(D);
    if (name == "clrg") return clrg_learn(D, cfg);
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

inline void aggregate_rows(Report& rep) {
    std::map<std::tuple<std::string, bool, int>, std::vector<const ReportRow*>> groups;
    for (const auto& r : rep.rows) groups[{r.algorithm, r.robust, r.n}].push_back(&r);
    for (auto& [key, rows] : groups) {
        ReportAggregate a;
        a.algorithm = std::get<0>(key);
        a.robust = std::get<1>(key);
        a.n = std::get<2>(key);
        a.trials = static_cast<int>(rows.size());
        double sum = 0, exact = 0;
        for (auto* r : rows) {
            sum += r->rf;
            exact += r->exact ? 1 : 0;
            a.failures += r->failed ? 1 : 0;
        }
        a.mean_rf = sum / a.trials;
        double sq = 0;
        for (auto* r : rows) sq += (r->rf - a.mean_rf) * (r->rf - a.mean_rf);
        a.std_rf = a.trials > 1 ? std::sqrt(sq / (a.trials - 1)) : 0.0;
        a.std_over_mean = a.mean_rf > 0 ? a.std_rf / a.mean_rf : 0.0;
        a.exact_rate = exact / a.trials;
        rep.aggregates.push_back(a);
    }
}

}  // namespace detail

inline Report run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    for (size_t i = 1; i < cfg.sample_counts.size(); ++i)
        if (cfg.sample_counts[i] <= cfg.sample_counts[i - 1])
            throw std::invalid_argument("sample_counts must be strictly increasing");
    const GroundTruthModel truth = make_archetype_model(
        cfg.archetype, cfg.size_param, cfg.rho_edge, cfg.l_max, cfg.alpha, cfg.m);
    const int worst = rf_worst_case(truth.tree);
    const int n_max = cfg.sample_counts.back();

    std::optional<GroundTruthModel> alt;
    if (cfg.corrupt_enabled && is_model_pattern(cfg.pattern))
        alt = default_alt_model(truth, cfg.alt_rho_scale, cfg.alt_value_scale);

    std::vector<std::vector<ReportRow>> per_trial(cfg.trials);
    auto run_trial = [&](int t) {
        std::vector<ReportRow>& rows = per_trial[t];
        const std::uint64_t sample_seed = cfg.base_seed + static_cast<std::uint64_t>(t);
        const DataMatrix full = sample(truth, n_max, sample_seed);
        for (int n : cfg.sample_counts) {
            DataMatrix data = full.head_rows(n);
            if (cfg.corrupt_enabled && cfg.corruption_n1 > 0) {
                CorruptionSpec spec;
                spec.pattern = cfg.pattern;
                spec.n1 = cfg.corruption_n1;
                spec.amplitude = cfg.amplitude;
                spec.seed = sample_seed ^ detail::kCorruptionSeedXor;
                spec.alt_model = alt;
                data = inject(data, spec);
            }
            std::vector<std::pair<bool, int>> estimators;
            if (cfg.estimator_n1 > 0) estimators.emplace_back(true, cfg.estimator_n1);
            estimators.emplace_back(false, 0);
            for (auto [robust, n1] : estimators) {
                const DistanceMatrix D = distance_matrix(data, n1);
                for (const auto& algo : cfg.algorithms) {
                    ReportRow row;
                    row.trial = t;
                    row.algorithm = algo;
                    row.robust = robust;
                    row.n = n;
                    row.n1 = n1;
                    const auto t0 = std::chrono::steady_clock::now();
                    try {
                        LearnedTree lt = detail::run_learner(algo, D, cfg.rg);
                        row.failed = lt.provenance.failed;
                        row.rf = row.failed ? worst : rf_distance(lt.tree, truth.tree);
                    } catch (const std::exception&) {
                        row.failed = true;
                        row.rf = worst;
                    }
                    const auto t1 = std::chrono::steady_clock::now();
                    if (cfg.record_timing)
                        row.wall_ms =
                            std::chrono::duration<double, std::milli>(t1 - t0).count();
                    row.exact = row.rf == 0;
                    rows.push_back(row);
                }
            }
        }
    };

    if (cfg.jobs <= 1 || cfg.trials == 1) {
        for (int t = 0; t < cfg.trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int nt = std::min(cfg.jobs, cfg.trials);
        for (int w = 0; w < nt; ++w)
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1))
                    run_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    Report rep;
    for (int t = 0; t < cfg.trials; ++t)
        for (auto& r : per_trial[t]) rep.rows.push_back(std::move(r));
    detail::aggregate_rows(rep);
    return rep;
}

inline void write_report_csv(const Report& rep, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << "trial,algorithm,robust,n,n1,rf,exact,wall_ms\n";
    char buf[64];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
        f << r.trial << ',' << r.algorithm << ',' << (r.robust ? 1 : 0) << ',' << r.n << ','
          << r.n1 << ',' << r.rf << ',' << (r.exact ? 1 : 0) << ',' << buf << "\n";
    }
}

inline json report_summary_json(const Report& rep) {
    json groups = json::array();
    for (const auto& a : rep.aggregates)
        groups.push_back({{"algorithm", a.algorithm},
                          {"robust", a.robust},
                          {"n", a.n},
                          {"trials", a.trials},
                          {"failures", a.failures},
                          {"mean_rf", a.mean_rf},
                          {"std_rf", a.std_rf},
                          {"std_over_mean", a.std_over_mean},
                          {"exact_rate", a.exact_rate}});
    return {{"groups", groups}};
}

inline json experiment_config_to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = {{"archetype", archetype_to_string(c.archetype)}, {"size", c.size_param},
                  {"m", c.m},           {"rho_edge", c.rho_edge},
                  {"l_max", c.l_max},   {"alpha", c.alpha}};
    j["sample_counts"] = c.sample_counts;
    if (c.corrupt_enabled)
        j["corruption"] = {{"pattern", corruption_pattern_to_string(c.pattern)},
                           {"n1", c.corruption_n1},
                           {"amplitude", c.amplitude},
                           {"alt_rho_scale", c.alt_rho_scale},
                           {"alt_value_scale", c.alt_value_scale}};
    j["algorithms"] = c.algorithms;
    j["rg"] = {{"epsilon", c.rg.epsilon}, {"tau", c.rg.tau}, {"max_iterations", c.rg.max_iterations}};
    j["trials"] = c.trials;
    j["base_seed"] = c.base_seed;
    j["estimator_n1"] = c.estimator_n1;
    if (!c.csv_path.empty()) j["csv_path"] = c.csv_path;
    if (!c.summary_path.empty()) j["summary_path"] = c.summary_path;
    j["jobs"] = c.jobs;
    j["record_timing"] = c.record_timing;
    return j;
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    const auto& m = detail::need(j, "model", "experiment config");
    c.archetype = archetype_from_string(detail::need(m, "archetype", "model").get<std::string>());
    c.size_param = detail::need(m, "size", "model").get<int>();
    c.m = m.value("m", 3);
    c.rho_edge = m.value("rho_edge", 0.24);
    c.l_max = m.value("l_max", 1);
    c.alpha = m.value("alpha", 1.0);
    c.sample_counts.clear();
    for (const auto& n : detail::need(j, "sample_counts", "experiment config"))
        c.sample_counts.push_back(n.get<int>());
    if (j.contains("corruption")) {
        const auto& co = j.at("corruption");
        c.corrupt_enabled = true;
        c.pattern = corruption_pattern_from_string(
            detail::need(co, "pattern", "corruption").get<std::string>());
        c.corruption_n1 = detail::need(co, "n1", "corruption").get<int>();
        c.amplitude = co.value("amplitude", 60.0);
        c.alt_rho_scale = co.value("alt_rho_scale", 2.0);
        c.alt_value_scale = co.value("alt_value_scale", 1.0);
    }
    c.algorithms.clear();
    for (const auto& a : detail::need(j, "algorithms", "experiment config"))
        c.algorithms.push_back(a.get<std::string>());
    if (j.contains("rg")) {
        c.rg.epsilon = j.at("rg").value("epsilon", 0.0);
        c.rg.tau = j.at("rg").value("tau", 0.0);
        c.rg.max_iterations = j.at("rg").value("max_iterations", 64);
    }
    c.trials = j.value("trials", 1);
    c.base_seed = j.value("base_seed", 1ull);
    c.estimator_n1 = j.value("estimator_n1", 0);
    c.csv_path = j.value("csv_path", "");
    c.summary_path = j.value("summary_path", "");
    c.jobs = j.value("jobs", 1);
    c.record_timing = j.value("record_timing", false);
    return c;
}

}  // namespace latree
