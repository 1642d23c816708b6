// Command-line front-end over the latree library: generate models and data,
// inject corruptions, learn structures, evaluate against ground truth, run
// seeded experiments and evaluate the sample-complexity formulas.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "latree/bounds.hpp"
#include "latree/corrupt.hpp"
#include "latree/estimate.hpp"
#include "latree/experiment.hpp"
#include "latree/io.hpp"
#include "latree/model.hpp"
#include "latree/reconstruct.hpp"
#include "latree/rf.hpp"

namespace lt = latree;

namespace {

lt::DataMatrix load_data(const std::string& path, int l_max) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
        return lt::read_data_binary(path, l_max);
    return lt::read_data_csv(path);
}

void save_data(const lt::DataMatrix& d, const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin")
        lt::write_data_binary(d, path);
    else
        lt::write_data_csv(d, path);
}

lt::DistanceMatrix load_distances(const std::string& path) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return lt::distance_matrix_from_json(lt::load_json_file(path));
    return lt::read_distance_text(path);
}

int cmd_generate(const std::string& archetype, int size, int m, double rho_edge, int l_max,
                 double alpha, int n, std::uint64_t seed, const std::string& model_out,
                 const std::string& data_out, const std::string& distances_out) {
    const auto model = lt::make_archetype_model(lt::archetype_from_string(archetype), size,
                                                rho_edge, l_max, alpha, m);
    if (!model_out.empty()) lt::save_json_file(lt::model_to_json(model), model_out);
    if (!data_out.empty()) save_data(lt::sample(model, n, seed), data_out);
    if (!distances_out.empty()) {
        const auto D = lt::exact_distance_matrix(model);
        if (distances_out.size() > 5 && distances_out.substr(distances_out.size() - 5) == ".json")
            lt::save_json_file(lt::distance_matrix_to_json(D), distances_out);
        else
            lt::write_distance_text(D, distances_out);
    }
    return 0;
}

int cmd_corrupt(const std::string& data_in, int l_max, const std::string& pattern, int n1,
                double amplitude, std::uint64_t seed, const std::string& alt_model_path,
                const std::string& base_model_path, double alt_rho_scale,
                const std::string& data_out, const std::string& audit_out) {
    const lt::DataMatrix clean = load_data(data_in, l_max);
    lt::CorruptionSpec spec;
    spec.pattern = lt::corruption_pattern_from_string(pattern);
    spec.n1 = n1;
    spec.amplitude = amplitude;
    spec.seed = seed;
    if (!alt_model_path.empty())
        spec.alt_model = lt::model_from_json(lt::load_json_file(alt_model_path));
    else if (lt::is_model_pattern(spec.pattern) && !base_model_path.empty())
        spec.alt_model = lt::default_alt_model(
            lt::model_from_json(lt::load_json_file(base_model_path)), alt_rho_scale);
    const lt::DataMatrix dirty = lt::inject(clean, spec);
    save_data(dirty, data_out);
    if (!audit_out.empty()) {
        const auto counts = lt::audit_budget(clean, dirty);
        lt::save_json_file(
            {{"per_column_changes", counts}, {"max_changes", lt::max_column_changes(counts)}},
            audit_out);
    }
    return 0;
}

int cmd_learn(const std::string& algo, const std::string& distances_path,
              const std::string& data_path, int l_max, int n1, bool plain, bool center,
              double epsilon, double tau, const std::string& out,
              const std::string& newick_out) {
    lt::DistanceMatrix D;
    if (!distances_path.empty()) {
        D = load_distances(distances_path);
    } else if (!data_path.empty()) {
        const lt::DataMatrix data = load_data(data_path, l_max);
        lt::EstimateOptions opt;
        opt.center = center;
        D = lt::distance_matrix(data, plain ? 0 : n1, opt);
    } else {
        throw std::runtime_error("learn: provide --distances or --data");
    }
    lt::RgConfig cfg;
    cfg.epsilon = epsilon;
    cfg.tau = tau;
    const lt::LearnedTree t = lt::detail::run_learner(algo, D, cfg);
    lt::save_json_file(lt::learned_tree_to_json(t), out);
    if (!newick_out.empty()) {
        std::ofstream f(newick_out);
        f << lt::to_newick(t) << "\n";
    }
    return 0;
}

int cmd_eval(const std::string& tree_path, const std::string& truth_path,
             const std::string& out) {
    const lt::LearnedTree learned = lt::learned_tree_from_json(lt::load_json_file(tree_path));
    const auto truth_json = lt::load_json_file(truth_path);
    lt::LatentTree truth = truth_json.contains("params")
                               ? lt::tree_from_json(truth_json.at("tree"))
                               : lt::tree_from_json(truth_json);
    const int rf = lt::rf_distance(learned.tree, truth);
    const lt::json rep = {{"rf", rf},
                          {"exact", rf == 0},
                          {"observed", learned.tree.observed_count()}};
    if (out.empty())
        std::cout << rep.dump(2) << "\n";
    else
        lt::save_json_file(rep, out);
    return 0;
}

int cmd_experiment(const std::string& config_path, int jobs_override,
                   const std::string& csv_override, const std::string& summary_override) {
    lt::ExperimentConfig cfg = lt::experiment_config_from_json(lt::load_json_file(config_path));
    if (jobs_override > 0) cfg.jobs = jobs_override;
    if (!csv_override.empty()) cfg.csv_path = csv_override;
    if (!summary_override.empty()) cfg.summary_path = summary_override;
    if (const char* env = std::getenv("EXPERIMENT_SEED"))
        cfg.base_seed = std::strtoull(env, nullptr, 10);
    const lt::Report rep = lt::run_experiment(cfg);
    if (!cfg.csv_path.empty()) lt::write_report_csv(rep, cfg.csv_path);
    if (!cfg.summary_path.empty()) lt::save_json_file(lt::report_summary_json(rep), cfg.summary_path);
    if (cfg.csv_path.empty() && cfg.summary_path.empty())
        std::cout << lt::report_summary_json(rep).dump(2) << "\n";
    return 0;
}

int cmd_bounds(const std::string& params_path, const std::string& algo, const std::string& out) {
    const lt::BoundParams p = lt::bound_params_from_json(lt::load_json_file(params_path));
    lt::json result;
    result["params"] = lt::bound_params_to_json(p);
    auto eval_algo = [&](const std::string& name) {
        const auto sc = lt::sample_complexity(lt::bound_algorithm_from_string(name), p);
        result["sample_complexity"][name] = {{"n2_required", sc.n2_required},
                                             {"n2_over_n1_required", sc.n2_over_n1_required}};
    };
    if (algo == "all") {
        for (const char* name : {"rrg", "rnj", "rsnj"}) eval_algo(name);
        if (p.delta_mst > 0) eval_algo("rclrg");
    } else {
        eval_algo(algo);
    }
    if (p.rho_min > 0 && p.rho_max > 0)
        result["snj_gap_g"] = lt::snj_gap_g(p.v_obs, p.rho_min, p.rho_max);
    if (p.rho_max > 0 && p.v_obs >= 3) {
        const auto fano = lt::fano_lower_bound(p.v_obs, p.rho_max, p.l_max, p.eta);
        result["fano"] = {{"value", fano.value},
                          {"vacuous", fano.vacuous},
                          {"branch_tree", fano.branch_tree},
                          {"branch_star", fano.branch_star}};
    }
    if (out.empty())
        std::cout << result.dump(2) << "\n";
    else
        lt::save_json_file(result, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust structure learning for Gaussian latent tree models"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "build an archetype model and sample data");
    std::string g_archetype = "hmm", g_model_out, g_data_out, g_dist_out;
    int g_size = 4, g_m = 3, g_l_max = 1, g_n = 0;
    double g_rho = 0.24, g_alpha = 1.0;
    std::uint64_t g_seed = 1;
    gen->add_option("--archetype", g_archetype, "hmm|double_binary|full_m_tree|double_star");
    gen->add_option("--size", g_size, "diameter (hmm/double_binary), depth (full_m_tree), d_max (double_star)");
    gen->add_option("--m", g_m, "branching factor for full_m_tree");
    gen->add_option("--rho-edge", g_rho, "per-edge information distance")->check(CLI::PositiveNumber);
    gen->add_option("--l-max", g_l_max, "node vector dimension")->check(CLI::PositiveNumber);
    gen->add_option("--alpha", g_alpha, "homogeneity scale")->check(CLI::PositiveNumber);
    gen->add_option("--n", g_n, "sample count")->check(CLI::NonNegativeNumber);
    gen->add_option("--seed", g_seed, "sampling seed");
    gen->add_option("--model-out", g_model_out, "model JSON path");
    gen->add_option("--data-out", g_data_out, "data path (.csv or .bin)");
    gen->add_option("--exact-distances-out", g_dist_out, "exact distance matrix path (.json or text)");

    // corrupt
    auto* cor = app.add_subcommand("corrupt", "inject a corruption pattern into a data matrix");
    std::string c_data_in, c_pattern = "uniform", c_alt_model, c_base_model, c_data_out, c_audit_out;
    int c_l_max = 1, c_n1 = 0;
    double c_amp = 60.0, c_alt_scale = 2.0;
    std::uint64_t c_seed = 1;
    cor->add_option("--data", c_data_in, "input data (.csv or .bin)")->required();
    cor->add_option("--l-max", c_l_max, "node dimension (binary input only)");
    cor->add_option("--pattern", c_pattern, "corruption pattern name");
    cor->add_option("--n1", c_n1, "corruption budget (even, n1/2 per column)");
    cor->add_option("--amplitude", c_amp, "corruption amplitude A");
    cor->add_option("--seed", c_seed, "corruption seed");
    cor->add_option("--alt-model", c_alt_model, "alternate model JSON for model-based patterns");
    cor->add_option("--base-model", c_base_model, "base model JSON, default alternate derived from it");
    cor->add_option("--alt-rho-scale", c_alt_scale, "per-edge distance scale of the default alternate");
    cor->add_option("--out", c_data_out, "corrupted data path")->required();
    cor->add_option("--audit-out", c_audit_out, "budget audit JSON path");

    // learn
    auto* lrn = app.add_subcommand("learn", "reconstruct a latent tree from distances or data");
    std::string l_algo = "clrg", l_dist, l_data, l_out, l_newick;
    int l_l_max = 1, l_n1 = 0;
    bool l_plain = false, l_robust = false, l_center = false;
    double l_eps = 0, l_tau = 0;
    lrn->add_option("--algo", l_algo, "rg|nj|snj|clrg");
    lrn->add_option("--distances", l_dist, "distance matrix (.json or text)");
    lrn->add_option("--data", l_data, "data matrix (.csv or .bin); distances are estimated");
    lrn->add_option("--l-max", l_l_max, "node dimension (binary input only)");
    lrn->add_option("--n1", l_n1, "corruption level for the robust estimator");
    lrn->add_flag("--robust", l_robust, "use the truncated estimator with --n1");
    lrn->add_flag("--plain", l_plain, "use the plain estimator (n1 = 0)");
    lrn->add_flag("--center", l_center, "subtract column means before estimating");
    lrn->add_option("--epsilon", l_eps, "grouping threshold (0 = auto)");
    lrn->add_option("--tau", l_tau, "distance cutoff for averaging sets (0 = auto)");
    lrn->add_option("--out", l_out, "learned tree JSON path")->required();
    lrn->add_option("--newick", l_newick, "Newick path (leaf-observed trees)");

    // eval
    auto* ev = app.add_subcommand("eval", "Robinson-Foulds distance against a reference tree");
    std::string e_tree, e_truth, e_out;
    ev->add_option("--tree", e_tree, "learned tree JSON")->required();
    ev->add_option("--truth", e_truth, "model or tree JSON")->required();
    ev->add_option("--out", e_out, "report JSON path (stdout when omitted)");

    // experiment
    auto* ex = app.add_subcommand("experiment", "run the seeded reconstruction protocol");
    std::string x_config, x_csv, x_summary;
    int x_jobs = 0;
    ex->add_option("--config", x_config, "experiment config JSON")->required();
    ex->add_option("--jobs", x_jobs, "trial-level parallelism");
    ex->add_option("--csv", x_csv, "override csv output path");
    ex->add_option("--summary", x_summary, "override summary output path");

    // bounds
    auto* bd = app.add_subcommand("bounds", "evaluate the sample-complexity formulas");
    std::string b_params, b_algo = "all", b_out;
    bd->add_option("--params", b_params, "bound parameters JSON")->required();
    bd->add_option("--algo", b_algo, "rrg|rnj|rsnj|rclrg|all");
    bd->add_option("--out", b_out, "result JSON path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed())
            return cmd_generate(g_archetype, g_size, g_m, g_rho, g_l_max, g_alpha, g_n, g_seed,
                                g_model_out, g_data_out, g_dist_out);
        if (cor->parsed()) {
            if (c_n1 % 2 != 0) {
                std::cerr << "corrupt: --n1 must be even (budget is n1/2 per column)\n";
                return 2;
            }
            return cmd_corrupt(c_data_in, c_l_max, c_pattern, c_n1, c_amp, c_seed, c_alt_model,
                               c_base_model, c_alt_scale, c_data_out, c_audit_out);
        }
        if (lrn->parsed()) {
            if (l_robust && l_plain) {
                std::cerr << "learn: --robust and --plain are mutually exclusive\n";
                return 2;
            }
            return cmd_learn(l_algo, l_dist, l_data, l_l_max, l_n1, l_plain, l_center, l_eps,
                             l_tau, l_out, l_newick);
        }
        if (ev->parsed()) return cmd_eval(e_tree, e_truth, e_out);
        if (ex->parsed()) return cmd_experiment(x_config, x_jobs, x_csv, x_summary);
        if (bd->parsed()) return cmd_bounds(b_params, b_algo, b_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
