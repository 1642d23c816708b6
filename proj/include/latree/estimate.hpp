#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latree/data.hpp"
#include "latree/model.hpp"

namespace latree {

/// Sum of the n - n1 smallest-magnitude entrywise products a_i * b_i.
/// Ties at the truncation cut keep the smaller index; the kept products are
/// summed in ascending index order so the result is reproducible.
inline double truncated_inner_product(const double* a, const double* b, int n, int n1) {
    if (n1 < 0 || n1 > n) throw std::invalid_argument("truncated_inner_product: need 0 <= n1 <= n");
    if (n1 == n) return 0.0;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = a[i] * b[i];
    if (n1 == 0) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += q[i];
        return s;
    }
    const int keep = n - n1;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](int x, int y) {
        const double ax = std::abs(q[x]), ay = std::abs(q[y]);
        return ax != ay ? ax < ay : x < y;
    };
    std::nth_element(idx.begin(), idx.begin() + (keep - 1), idx.end(), less);
    const int cut = idx[keep - 1];
    const double cut_abs = std::abs(q[cut]);
    double s = 0;
    for (int i = 0; i < n; ++i) {
        const double ai = std::abs(q[i]);
        if (ai < cut_abs || (ai == cut_abs && i <= cut)) s += q[i];
    }
    return s;
}

inline double truncated_inner_product(const std::vector<double>& a, const std::vector<double>& b,
                                      int n1) {
    if (a.size() != b.size())
        throw std::invalid_argument("truncated_inner_product: length mismatch");
    return truncated_inner_product(a.data(), b.data(), static_cast<int>(a.size()), n1);
}

struct EstimateOptions {
    double sigma_floor = 1e-12;   // singular values at or below this saturate
    double d_cap_per_dim = 50.0;  // distance cap is d_cap_per_dim * l_max
    bool center = false;          // subtract column means first (off: zero-mean model)
};

/// Entrywise truncated second-moment estimate of Sigma_ij, normalized by
/// n - n1. The i = j case is exactly symmetric by construction.
inline Eigen::MatrixXd robust_covariance(const DataMatrix& data, int i, int j, int n1,
                                         const EstimateOptions& opt = {}) {
    if (n1 >= data.n) throw std::invalid_argument("robust_covariance: need n1 < n");
    const int l = data.l_max;
    Eigen::MatrixXd cov(l, l);
    if (n1 == 0 && !opt.center) {
        for (int s = 0; s < l; ++s)
            for (int t = (i == j) ? s : 0; t < l; ++t) {
                const double v = data.values.col(data.col_index(i, s))
                                     .dot(data.values.col(data.col_index(j, t))) /
                                 data.n;
                cov(s, t) = v;
                if (i == j) cov(t, s) = v;
            }
        return cov;
    }
    std::vector<double> ca(data.n), cb(data.n);
    auto column = [&](int node, int coord, std::vector<double>& dst) {
        Eigen::VectorXd col = data.values.col(data.col_index(node, coord));
        if (opt.center) col.array() -= col.mean();
        for (int r = 0; r < data.n; ++r) dst[r] = col(r);
    };
    const double norm = 1.0 / (data.n - n1);
    for (int s = 0; s < l; ++s) {
        column(i, s, ca);
        const int t0 = (i == j) ? s : 0;
        for (int t = t0; t < l; ++t) {
            column(j, t, cb);
            const double v = norm * truncated_inner_product(ca.data(), cb.data(), data.n, n1);
            cov(s, t) = v;
            if (i == j) cov(t, s) = v;
        }
    }
    return cov;
}

struct DistanceEstimate {
    double value = 0;
    bool saturated = false;
};

/// Plug-in information distance from truncated covariance estimates. When a
/// singular value of any block falls to the floor the distance saturates at
/// the cap instead of diverging; negatives clamp to zero.
inline DistanceEstimate estimate_distance(const DataMatrix& data, int i, int j, int n1,
                                          const EstimateOptions& opt = {}) {
    const int lo = std::min(i, j), hi = std::max(i, j);
    const Eigen::MatrixXd cross = robust_covariance(data, lo, hi, n1, opt);
    const Eigen::MatrixXd mii = robust_covariance(data, lo, lo, n1, opt);
    const Eigen::MatrixXd mjj = robust_covariance(data, hi, hi, n1, opt);
    const double d_cap = opt.d_cap_per_dim * data.l_max;
    auto log_prod_sv = [&](const Eigen::MatrixXd& m, bool& sat) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        double s = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k) {
            const double sv = svd.singularValues()(k);
            if (sv <= opt.sigma_floor) {
                sat = true;
                return 0.0;
            }
            s += std::log(sv);
        }
        return s;
    };
    bool sat = false;
    const double lc = log_prod_sv(cross, sat);
    const double li = log_prod_sv(mii, sat);
    const double lj = log_prod_sv(mjj, sat);
    if (sat) return {d_cap, true};
    const double d = -lc + 0.5 * li + 0.5 * lj;
    if (d > d_cap) return {d_cap, true};
    return {std::max(d, 0.0), false};
}

struct MatrixFlag {
    enum class Kind { exact, plain_estimate, robust_estimate };
    Kind kind = Kind::exact;
    int n1 = 0;

    std::string to_string() const {
        switch (kind) {
            case Kind::exact: return "exact";
            case Kind::plain_estimate: return "plain_estimate";
            case Kind::robust_estimate: return "robust_estimate(" + std::to_string(n1) + ")";
        }
        return "?";
    }
};

/// Symmetric pairwise information distances over a labeled node set.
struct DistanceMatrix {
    std::vector<int> labels;
    Eigen::MatrixXd values;  // indexed by position in labels
    MatrixFlag flag;
    std::vector<std::pair<int, int>> saturated;  // label pairs

    int size() const { return static_cast<int>(labels.size()); }

    int position_of(int label) const {
        for (int i = 0; i < size(); ++i)
            if (labels[i] == label) return i;
        throw std::invalid_argument("unknown label " + std::to_string(label));
    }

    double at_labels(int a, int b) const { return values(position_of(a), position_of(b)); }
};

/// d(i,k) - d(j,k) read off a distance matrix by labels.
inline double phi(const DistanceMatrix& d, int i, int j, int k) {
    return d.at_labels(i, k) - d.at_labels(j, k);
}

/// All-pairs estimate over the observed nodes; each unordered pair computed
/// once, optionally across threads (identical output either way).
inline DistanceMatrix distance_matrix(const DataMatrix& data, int n1,
                                      const EstimateOptions& opt = {}, int threads = 1) {
    const int o = data.o;
    DistanceMatrix out;
    out.labels.resize(o);
    std::iota(out.labels.begin(), out.labels.end(), 0);
    out.values = Eigen::MatrixXd::Zero(o, o);
    out.flag = n1 > 0 ? MatrixFlag{MatrixFlag::Kind::robust_estimate, n1}
                      : MatrixFlag{MatrixFlag::Kind::plain_estimate, 0};
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < o; ++i)
        for (int j = i + 1; j < o; ++j) pairs.emplace_back(i, j);
    std::vector<DistanceEstimate> results(pairs.size());
    auto work = [&](size_t begin, size_t end) {
        for (size_t k = begin; k < end; ++k)
            results[k] = estimate_distance(data, pairs[k].first, pairs[k].second, n1, opt);
    };
    if (threads <= 1 || pairs.size() < 2) {
        work(0, pairs.size());
    } else {
        const int nt = std::min<size_t>(threads, pairs.size());
        std::vector<std::thread> pool;
        const size_t chunk = (pairs.size() + nt - 1) / nt;
        for (int t = 0; t < nt; ++t) {
            const size_t b = t * chunk, e = std::min(pairs.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    for (size_t k = 0; k < pairs.size(); ++k) {
        auto [i, j] = pairs[k];
        out.values(i, j) = out.values(j, i) = results[k].value;
        if (results[k].saturated) out.saturated.emplace_back(i, j);
    }
    return out;
}

/// Ground-truth distances over the observed nodes of a model.
inline DistanceMatrix exact_distance_matrix(const GroundTruthModel& m) {
    auto obs = m.tree.observed_ids();
    DistanceMatrix out;
    out.labels = obs;
    const int o = static_cast<int>(obs.size());
    out.values = Eigen::MatrixXd::Zero(o, o);
    out.flag = {MatrixFlag::Kind::exact, 0};
    for (int i = 0; i < o; ++i)
        for (int j = i + 1; j < o; ++j)
            out.values(i, j) = out.values(j, i) = exact_distance(m, obs[i], obs[j]);
    return out;
}

}  // namespace latree
