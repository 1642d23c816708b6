#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>

#include "latree/bounds.hpp"
#include "latree/corrupt.hpp"
#include "latree/estimate.hpp"
#include "latree/model.hpp"
#include "latree/reconstruct.hpp"
#include "latree/tree.hpp"

namespace latree {

using json = nlohmann::json;

namespace detail {

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) rows.push_back(m(r, c));
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, int rows, int cols,
                                        const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
        throw std::runtime_error(where + ": expected row-major array of " +
                                 std::to_string(rows * cols) + " numbers");
    Eigen::MatrixXd m(rows, cols);
    int k = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j[k++].get<double>();
    return m;
}

inline const json& need(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw std::runtime_error(where + ": missing field '" + key + "'");
    return j.at(key);
}

}  // namespace detail

inline json tree_to_json(const LatentTree& t) {
    json nodes = json::array();
    for (int i = 0; i < t.node_count(); ++i)
        nodes.push_back({{"id", t.ids[i]},
                         {"kind", t.kinds[i] == NodeKind::observed ? "observed" : "hidden"}});
    json edges = json::array();
    for (auto [a, b] : t.edges) edges.push_back({a, b});
    json out = {{"nodes", nodes}, {"edges", edges}};
    if (t.root != -1) out["root"] = t.root;
    return out;
}

inline LatentTree tree_from_json(const json& j) {
    LatentTree t;
    for (const auto& n : detail::need(j, "nodes", "tree")) {
        t.ids.push_back(detail::need(n, "id", "tree.nodes").get<int>());
        const std::string k = detail::need(n, "kind", "tree.nodes").get<std::string>();
        if (k != "observed" && k != "hidden")
            throw std::runtime_error("tree.nodes.kind: expected observed|hidden");
        t.kinds.push_back(k == "observed" ? NodeKind::observed : NodeKind::hidden);
    }
    for (const auto& e : detail::need(j, "edges", "tree"))
        t.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("root")) t.root = j.at("root").get<int>();
    return t;
}

inline json params_to_json(const ModelParams& p) {
    return {{"A", detail::matrix_to_json(p.A)},
            {"sigma_r", detail::matrix_to_json(p.sigma_r)},
            {"sigma_n", detail::matrix_to_json(p.sigma_n)},
            {"alpha", p.alpha},
            {"l_max", p.l_max}};
}

inline ModelParams params_from_json(const json& j) {
    ModelParams p;
    p.l_max = detail::need(j, "l_max", "params").get<int>();
    p.alpha = detail::need(j, "alpha", "params").get<double>();
    p.A = detail::matrix_from_json(detail::need(j, "A", "params"), p.l_max, p.l_max, "params.A");
    p.sigma_r = detail::matrix_from_json(detail::need(j, "sigma_r", "params"), p.l_max, p.l_max,
                                         "params.sigma_r");
    p.sigma_n = detail::matrix_from_json(detail::need(j, "sigma_n", "params"), p.l_max, p.l_max,
                                         "params.sigma_n");
    return p;
}

inline json model_to_json(const GroundTruthModel& m) {
    return {{"tree", tree_to_json(m.tree)}, {"params", params_to_json(m.params)}};
}

inline GroundTruthModel model_from_json(const json& j) {
    return make_model(tree_from_json(detail::need(j, "tree", "model")),
                      params_from_json(detail::need(j, "params", "model")));
}

inline json distance_matrix_to_json(const DistanceMatrix& d) {
    json flag;
    switch (d.flag.kind) {
        case MatrixFlag::Kind::exact: flag = {{"kind", "exact"}}; break;
        case MatrixFlag::Kind::plain_estimate: flag = {{"kind", "plain_estimate"}}; break;
        case MatrixFlag::Kind::robust_estimate:
            flag = {{"kind", "robust_estimate"}, {"n1", d.flag.n1}};
            break;
    }
    json sat = json::array();
    for (auto [a, b] : d.saturated) sat.push_back({a, b});
    return {{"labels", d.labels},
            {"values", detail::matrix_to_json(d.values)},
            {"flag", flag},
            {"saturated", sat}};
}

inline DistanceMatrix distance_matrix_from_json(const json& j) {
    DistanceMatrix d;
    for (const auto& l : detail::need(j, "labels", "distances")) d.labels.push_back(l.get<int>());
    const int n = static_cast<int>(d.labels.size());
    d.values = detail::matrix_from_json(detail::need(j, "values", "distances"), n, n,
                                        "distances.values");
    if (j.contains("flag")) {
        const std::string k = detail::need(j.at("flag"), "kind", "distances.flag").get<std::string>();
        if (k == "exact") d.flag = {MatrixFlag::Kind::exact, 0};
        else if (k == "plain_estimate") d.flag = {MatrixFlag::Kind::plain_estimate, 0};
        else if (k == "robust_estimate")
            d.flag = {MatrixFlag::Kind::robust_estimate, j.at("flag").value("n1", 0)};
        else throw std::runtime_error("distances.flag.kind: unknown value '" + k + "'");
    }
    if (j.contains("saturated"))
        for (const auto& e : j.at("saturated"))
            d.saturated.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return d;
}

/// Square-matrix text form: a label header line, then one row per line.
inline void write_distance_text(const DistanceMatrix& d, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    for (int i = 0; i < d.size(); ++i) f << (i ? " " : "") << d.labels[i];
    f << "\n";
    char buf[40];
    for (int i = 0; i < d.size(); ++i) {
        for (int j = 0; j < d.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", d.values(i, j));
            f << (j ? " " : "") << buf;
        }
        f << "\n";
    }
}

inline DistanceMatrix read_distance_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error(path + ": empty file");
    DistanceMatrix d;
    {
        std::stringstream ss(header);
        int v;
        while (ss >> v) d.labels.push_back(v);
    }
    const int n = static_cast<int>(d.labels.size());
    d.values = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(f >> d.values(i, j))) throw std::runtime_error(path + ": truncated matrix");
    return d;
}

inline json provenance_to_json(const Provenance& p) {
    return {{"algorithm", p.algorithm}, {"epsilon", p.epsilon},   {"tau", p.tau},
            {"iterations", p.iterations}, {"failed", p.failed},   {"notes", p.notes}};
}

inline json learned_tree_to_json(const LearnedTree& lt) {
    json dists = json::array();
    for (const auto& [pr, v] : lt.distances)
        dists.push_back({{"i", pr.first}, {"j", pr.second}, {"d", v}});
    return {{"tree", tree_to_json(lt.tree)},
            {"observed_labels", lt.observed_labels},
            {"provenance", provenance_to_json(lt.provenance)},
            {"distances", dists}};
}

inline LearnedTree learned_tree_from_json(const json& j) {
    LearnedTree lt;
    lt.tree = tree_from_json(detail::need(j, "tree", "learned_tree"));
    for (const auto& l : detail::need(j, "observed_labels", "learned_tree"))
        lt.observed_labels.push_back(l.get<int>());
    if (j.contains("distances"))
        for (const auto& e : j.at("distances"))
            lt.distances[{e.at("i").get<int>(), e.at("j").get<int>()}] = e.at("d").get<double>();
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        lt.provenance.algorithm = p.value("algorithm", "");
        lt.provenance.epsilon = p.value("epsilon", 0.0);
        lt.provenance.tau = p.value("tau", 0.0);
        lt.provenance.iterations = p.value("iterations", 0);
        lt.provenance.failed = p.value("failed", false);
        if (p.contains("notes"))
            for (const auto& n : p.at("notes")) lt.provenance.notes.push_back(n.get<std::string>());
    }
    return lt;
}

inline json corruption_spec_to_json(const CorruptionSpec& s) {
    json out = {{"pattern", corruption_pattern_to_string(s.pattern)},
                {"n1", s.n1},
                {"amplitude", s.amplitude},
                {"seed", s.seed}};
    if (s.alt_model) out["alt_model"] = model_to_json(*s.alt_model);
    return out;
}

inline CorruptionSpec corruption_spec_from_json(const json& j) {
    CorruptionSpec s;
    s.pattern = corruption_pattern_from_string(
        detail::need(j, "pattern", "corruption").get<std::string>());
    s.n1 = detail::need(j, "n1", "corruption").get<int>();
    s.amplitude = j.value("amplitude", 1.0);
    s.seed = j.value("seed", 0ull);
    if (j.contains("alt_model")) s.alt_model = model_from_json(j.at("alt_model"));
    return s;
}

inline json bound_params_to_json(const BoundParams& p) {
    return {{"l_max", p.l_max},     {"rho_min", p.rho_min},
            {"rho_max", p.rho_max}, {"delta_min", p.delta_min},
            {"sigma_max_sq", p.sigma_max_sq}, {"d_max", p.d_max},
            {"n_tau", p.n_tau},     {"v_obs", p.v_obs},
            {"eta", p.eta},         {"c", p.c},
            {"iterations", p.iterations}, {"delta_mst", p.delta_mst},
            {"n1", p.n1},           {"n2", p.n2},
            {"epsilon", p.epsilon}};
}

inline BoundParams bound_params_from_json(const json& j) {
    BoundParams p;
    p.l_max = j.value("l_max", 1);
    p.rho_min = j.value("rho_min", 0.0);
    p.rho_max = j.value("rho_max", 0.0);
    p.delta_min = j.value("delta_min", 1.0);
    p.sigma_max_sq = j.value("sigma_max_sq", 1.0);
    p.d_max = j.value("d_max", 3);
    p.n_tau = j.value("n_tau", 0.0);
    p.v_obs = j.value("v_obs", 3);
    p.eta = j.value("eta", 0.1);
    p.c = j.value("c", 1.0);
    p.iterations = j.value("iterations", 1);
    p.delta_mst = j.value("delta_mst", 0.0);
    p.n1 = j.value("n1", 1.0);
    p.n2 = j.value("n2", 1.0);
    p.epsilon = j.value("epsilon", 0.0);
    return p;
}

inline json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed JSON: " + e.what());
    }
    return j;
}

inline void save_json_file(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

}  // namespace latree
