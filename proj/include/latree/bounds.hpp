#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace latree {

/// Inputs to the sample-complexity calculators. The absolute constant c from
/// the concentration bound is unknown in closed form and must be supplied
/// (default 1); n_tau defaults to the observed count when non-positive.
struct BoundParams {
    int l_max = 1;
    double rho_min = 0;
    double rho_max = 0;
    double delta_min = 1;
    double sigma_max_sq = 1;
    int d_max = 3;
    double n_tau = 0;
    int v_obs = 3;
    double eta = 0.1;
    double c = 1.0;
    int iterations = 1;     // L_R or L_C for the grouping-based rates
    double delta_mst = 0;   // required by the Chow-Liu variant
    double n1 = 1;
    double n2 = 1;
    double epsilon = 0;     // 0 resolves to rho_min / 2

    double kappa() const { return std::max(sigma_max_sq, rho_min); }
    double lambda() const {
        return 2.0 * l_max * l_max * std::exp(rho_max / l_max) /
               std::pow(delta_min, 1.0 / l_max);
    }
    double s() const {
        const double nt = n_tau > 0 ? n_tau : static_cast<double>(v_obs);
        return static_cast<double>(d_max) * d_max +
               2.0 * d_max * d_max * d_max * (1.0 + 2.0 * nt);
    }
    static constexpr double m() { return 2.0 / 9.0; }
    double eps() const { return epsilon > 0 ? epsilon : rho_min / 2.0; }
};

/// Two-term tail bound on the distance estimate,
/// f(x) = 2 l^2 exp(-w x) + l^2 exp(-u x^2).
inline double tail_f(double x, const BoundParams& p) {
    if (x <= 0) throw std::invalid_argument("tail_f: x must be positive");
    if (p.n1 <= 0) throw std::invalid_argument("tail_f: n1 must be positive");
    const double l2 = static_cast<double>(p.l_max) * p.l_max;
    const double w = 3.0 * p.n2 / (32.0 * p.lambda() * p.kappa() * p.n1);
    const double u = p.c * p.n2 / (4.0 * p.lambda() * p.lambda() * p.kappa() * p.kappa());
    return 2.0 * l2 * std::exp(-w * x) + l2 * std::exp(-u * x * x);
}

/// Layer-l error propagation, h^(l)(x) = s^l f(m^l x).
inline double tail_h(double x, int layer, const BoundParams& p) {
    if (layer < 0) throw std::invalid_argument("tail_h: layer must be >= 0");
    return std::pow(p.s(), layer) * tail_f(std::pow(BoundParams::m(), layer) * x, p);
}

/// Spectral-gap function g governing when the affinity-based merge order is
/// recoverable; branch selected by whether exp(-2 rho_max) exceeds 1/2.
inline double snj_gap_g(int v_obs, double rho_min, double rho_max) {
    if (v_obs < 2) throw std::invalid_argument("snj_gap_g: v_obs must be >= 2");
    const double contrast = 1.0 - std::exp(-2.0 * rho_min);
    if (std::exp(-2.0 * rho_max) > 0.5) return std::exp(-3.0 * rho_max) * contrast;
    return 0.5 * std::pow(2.0 * std::exp(-rho_max), std::log2(v_obs / 2.0)) *
           std::exp(-rho_max) * contrast;
}

enum class BoundAlgorithm { rrg, rnj, rsnj, rclrg };

inline BoundAlgorithm bound_algorithm_from_string(const std::string& s) {
    if (s == "rrg") return BoundAlgorithm::rrg;
    if (s == "rnj") return BoundAlgorithm::rnj;
    if (s == "rsnj") return BoundAlgorithm::rsnj;
    if (s == "rclrg") return BoundAlgorithm::rclrg;
    throw std::invalid_argument("unknown bound algorithm '" + s + "'");
}

struct SampleComplexity {
    double n2_required = 0;
    double n2_over_n1_required = 0;
};

/// Clean-sample counts sufficient for recovery with probability 1 - eta,
/// evaluated exactly as stated per algorithm.
inline SampleComplexity sample_complexity(BoundAlgorithm algo, const BoundParams& p) {
    const double l2 = static_cast<double>(p.l_max) * p.l_max;
    const double lam = p.lambda();
    const double kap = p.kappa();
    const double v = p.v_obs;
    if (p.eta <= 0 || p.eta >= 1) throw std::invalid_argument("eta must lie in (0,1)");
    SampleComplexity out;
    switch (algo) {
        case BoundAlgorithm::rrg: {
            const double eps = p.eps();
            if (eps <= 0) throw std::invalid_argument("rrg bound needs rho_min or epsilon");
            const int L = p.iterations;
            const double sL = std::pow(p.s(), L - 1);
            out.n2_required = 64.0 * lam * lam * kap * kap / (p.c * eps * eps) *
                              std::pow(4.5, 2 * L - 2) * std::log(17.0 * l2 * sL * v * v * v / p.eta);
            out.n2_over_n1_required = 128.0 * lam * kap / (3.0 * eps) * std::pow(4.5, L - 1) *
                                      std::log(34.0 * l2 * sL * v * v * v / p.eta);
            return out;
        }
        case BoundAlgorithm::rnj: {
            if (p.rho_min <= 0) throw std::invalid_argument("rnj bound needs rho_min");
            out.n2_required = 16.0 * lam * lam * kap * kap / (p.c * p.rho_min * p.rho_min) *
                              std::log(2.0 * v * v * l2 / p.eta);
            out.n2_over_n1_required =
                64.0 * lam * kap / (3.0 * p.rho_min) * std::log(4.0 * v * v * l2 / p.eta);
            return out;
        }
        case BoundAlgorithm::rsnj: {
            if (p.rho_min <= 0 || p.rho_max <= 0)
                throw std::invalid_argument("rsnj bound needs rho_min and rho_max");
            const double g = snj_gap_g(p.v_obs, p.rho_min, p.rho_max);
            out.n2_required = 16.0 * lam * lam * kap * kap * v * v /
                              (p.c * std::exp(2.0 * p.rho_min) * g * g) *
                              std::log(2.0 * v * v * l2 / p.eta);
            out.n2_over_n1_required = 64.0 * lam * kap * v / (3.0 * std::exp(p.rho_min) * g) *
                                      std::log(4.0 * v * v * l2 / p.eta);
            return out;
        }
        case BoundAlgorithm::rclrg: {
            if (p.delta_mst <= 0) throw std::invalid_argument("rclrg bound needs delta_mst");
            const double eps = p.eps();
            if (eps <= 0) throw std::invalid_argument("rclrg bound needs rho_min or epsilon");
            const int L = p.iterations;
            const double sL = std::pow(p.s(), L - 1);
            const double lead2 = std::max(4.0 / (eps * eps) * std::pow(4.5, 2 * L - 2),
                                          1.0 / (p.delta_mst * p.delta_mst));
            const double lead1 =
                std::max(2.0 / eps * std::pow(4.5, L - 1), 1.0 / p.delta_mst);
            out.n2_required = lead2 * 16.0 * lam * lam * kap * kap / p.c *
                              std::log((17.0 * l2 * sL * v * v * v + l2 * v * v) / p.eta);
            out.n2_over_n1_required =
                lead1 * 64.0 * lam * kap / 3.0 *
                std::log((34.0 * l2 * sL * v * v * v + 2.0 * l2 * v * v) / p.eta);
            return out;
        }
    }
    throw std::invalid_argument("unknown algorithm");
}

struct FanoBound {
    double value = 0;       // max of the two branches, clamped at 0
    bool vacuous = false;   // true when both branches are non-positive
    double branch_tree = 0; // deep full-3-tree family
    double branch_star = 0; // double-star family
};

/// Information-theoretic lower bound on the samples any decoder needs.
inline FanoBound fano_lower_bound(int v_obs, double rho_max, int l_max, double delta) {
    if (v_obs < 3) throw std::invalid_argument("fano_lower_bound: v_obs must be >= 3");
    if (delta <= 0 || delta >= 1) throw std::invalid_argument("delta must lie in (0,1)");
    if (rho_max <= 0 || l_max < 1) throw std::invalid_argument("bad rho_max or l_max");
    const double L = std::floor(std::log(static_cast<double>(v_obs)) / std::log(3.0));
    FanoBound out;
    {
        const double num =
            2.0 * (1.0 - delta) * (std::log(std::pow(3.0, 1.0 / 3.0)) * L - 1.0) - 2.0 / v_obs;
        const double den =
            -l_max * std::log(1.0 - std::exp(-rho_max / (L * l_max)));
        out.branch_tree = num / den;
    }
    {
        const double num = (1.0 - delta) / 5.0 - 2.0 / v_obs;
        const double den = -l_max * std::log(1.0 - std::exp(-2.0 * rho_max / (3.0 * l_max)));
        out.branch_star = num / den;
    }
    out.value = std::max(out.branch_tree, out.branch_star);
    if (out.value <= 0) {
        out.value = 0;
        out.vacuous = true;
    }
    return out;
}

}  // namespace latree
