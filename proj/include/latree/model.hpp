#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "latree/data.hpp"
#include "latree/random.hpp"
#include "latree/tree.hpp"

namespace latree {

/// Linear Gaussian channel on a rooted tree: x_child = A x_parent + noise,
/// root ~ N(0, sigma_r), noise at depth l ~ N(0, alpha^(l-1) sigma_n).
struct ModelParams {
    Eigen::MatrixXd A;
    Eigen::MatrixXd sigma_r;
    Eigen::MatrixXd sigma_n;
    double alpha = 1.0;
    int l_max = 1;
};

namespace detail {

inline bool is_spd(const Eigen::MatrixXd& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
        return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues().minCoeff() > tol;
}

inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int p) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m.rows(), m.cols());
    for (int i = 0; i < p; ++i) out = out * m;
    return out;
}

}  // namespace detail

/// Violations of the homogeneous-family invariants; empty means the params
/// define a valid monotone channel model.
inline std::vector<std::string> check_model_params(const ModelParams& p, double tol = 1e-10) {
    std::vector<std::string> out;
    const int l = p.l_max;
    if (l < 1) out.push_back("l_max must be positive");
    if (p.A.rows() != l || p.A.cols() != l) out.push_back("A must be l_max x l_max");
    if (p.sigma_r.rows() != l || p.sigma_r.cols() != l) out.push_back("sigma_r must be l_max x l_max");
    if (p.sigma_n.rows() != l || p.sigma_n.cols() != l) out.push_back("sigma_n must be l_max x l_max");
    if (!out.empty()) return out;
    if (p.alpha <= 0) out.push_back("alpha must be positive");
    if (std::abs(p.A.determinant()) < 1e-14) out.push_back("A must be non-singular");
    if (!detail::is_spd(p.sigma_r)) out.push_back("sigma_r must be symmetric positive-definite");
    if (!detail::is_spd(p.sigma_n)) out.push_back("sigma_n must be symmetric positive-definite");
    const double scale = 1.0 + p.sigma_r.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd homo = p.A * p.sigma_r * p.A.transpose() + p.sigma_n - p.alpha * p.sigma_r;
    if (homo.cwiseAbs().maxCoeff() > tol * scale)
        out.push_back("homogeneity A*sigma_r*A' + sigma_n = alpha*sigma_r violated");
    const Eigen::MatrixXd comm = p.A * p.sigma_r - p.sigma_r * p.A;
    if (comm.cwiseAbs().maxCoeff() > tol * scale) out.push_back("A and sigma_r must commute");
    Eigen::MatrixXd gram = p.A.transpose() * p.A / p.alpha;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.eigenvalues().minCoeff() <= 0 || es.eigenvalues().maxCoeff() >= 1)
        out.push_back("eigenvalues of A'A/alpha must lie in (0,1)");
    return out;
}

inline bool is_homogeneous(const ModelParams& p, double tol = 1e-10) {
    return check_model_params(p, tol).empty();
}

/// Canonical isotropic instance with the requested per-edge information
/// distance: A = sqrt(alpha) * exp(-rho_edge/l_max) * I, sigma_r = I.
inline ModelParams make_homogeneous_params(int l_max, double rho_edge, double alpha = 1.0) {
    if (l_max < 1) throw std::invalid_argument("l_max must be positive");
    if (rho_edge <= 0) throw std::invalid_argument("rho_edge must be positive");
    if (alpha <= 0) throw std::invalid_argument("alpha must be positive");
    const double lam = std::sqrt(alpha) * std::exp(-rho_edge / l_max);
    ModelParams p;
    p.l_max = l_max;
    p.alpha = alpha;
    p.A = lam * Eigen::MatrixXd::Identity(l_max, l_max);
    p.sigma_r = Eigen::MatrixXd::Identity(l_max, l_max);
    p.sigma_n = (alpha - lam * lam) * Eigen::MatrixXd::Identity(l_max, l_max);
    return p;
}

/// Tree + channel parameters + fixed root. Caches the rooted orientation,
/// per-node covariances and powers of A.
struct GroundTruthModel {
    LatentTree tree;
    ModelParams params;

    // derived, indexed by node position in tree.ids
    std::vector<int> parent;  // parent position, -1 at root
    std::vector<int> depth;
    std::vector<int> bfs_order;             // positions, root first
    std::vector<Eigen::MatrixXd> node_cov;  // Sigma_vv
    std::vector<Eigen::MatrixXd> a_pow;     // A^k for k = 0..max_depth+diam

    int root_pos = -1;

    int pos(int id) const { return tree.index_of(id); }
};

inline GroundTruthModel make_model(LatentTree tree, ModelParams params) {
    if (tree.root == -1) {
        // fix a deterministic root: the smallest hidden id, else smallest id
        int best = -1;
        for (int i = 0; i < tree.node_count(); ++i)
            if (tree.kinds[i] == NodeKind::hidden && (best == -1 || tree.ids[i] < best))
                best = tree.ids[i];
        tree.root = best == -1 ? *std::min_element(tree.ids.begin(), tree.ids.end()) : best;
    }
    auto issues = tree_structure_issues(tree);
    if (!issues.empty()) throw std::invalid_argument("invalid tree: " + issues.front());

    GroundTruthModel m;
    m.tree = std::move(tree);
    m.params = std::move(params);
    const int n = m.tree.node_count();
    auto adj = m.tree.adjacency_indexed();
    m.parent.assign(n, -1);
    m.depth.assign(n, 0);
    m.root_pos = m.tree.index_of(m.tree.root);
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(m.root_pos);
    seen[m.root_pos] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        m.bfs_order.push_back(u);
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                m.parent[v] = u;
                m.depth[v] = m.depth[u] + 1;
                q.push(v);
            }
    }
    int max_depth = 0;
    for (int d : m.depth) max_depth = std::max(max_depth, d);
    m.a_pow.resize(2 * max_depth + 2);
    m.a_pow[0] = Eigen::MatrixXd::Identity(m.params.l_max, m.params.l_max);
    for (size_t k = 1; k < m.a_pow.size(); ++k) m.a_pow[k] = m.params.A * m.a_pow[k - 1];
    m.node_cov.resize(n);
    for (int u : m.bfs_order) {
        if (u == m.root_pos) {
            m.node_cov[u] = m.params.sigma_r;
        } else {
            const double scale = std::pow(m.params.alpha, m.depth[u] - 1);
            m.node_cov[u] =
                m.params.A * m.node_cov[m.parent[u]] * m.params.A.transpose() + scale * m.params.sigma_n;
        }
    }
    return m;
}

inline GroundTruthModel make_archetype_model(Archetype kind, int size_param, double rho_edge,
                                             int l_max, double alpha = 1.0, int m = 3) {
    return make_model(build_archetype(kind, size_param, m),
                      make_homogeneous_params(l_max, rho_edge, alpha));
}

namespace detail {

// lowest common ancestor in the rooted orientation, by positions
inline int lca_pos(const GroundTruthModel& m, int a, int b) {
    while (m.depth[a] > m.depth[b]) a = m.parent[a];
    while (m.depth[b] > m.depth[a]) b = m.parent[b];
    while (a != b) {
        a = m.parent[a];
        b = m.parent[b];
    }
    return a;
}

}  // namespace detail

/// Exact cross-covariance E[x_i x_j'] via the conditional-expectation
/// recursion: both nodes relate to their meet w by channel powers, so
/// Sigma_ij = A^a Sigma_ww (A^b)' with a, b the hop counts down from w.
inline Eigen::MatrixXd exact_covariance(const GroundTruthModel& m, int i, int j) {
    const int pi = m.pos(i), pj = m.pos(j);
    const int w = detail::lca_pos(m, pi, pj);
    const int a = m.depth[pi] - m.depth[w];
    const int b = m.depth[pj] - m.depth[w];
    return m.a_pow[a] * m.node_cov[w] * m.a_pow[b].transpose();
}

/// Shortcut form for the alpha = 1 symmetric commuting family:
/// Sigma_ij = Sigma_r A^g with g the hop distance. Used as a cross-check.
inline Eigen::MatrixXd covariance_shortcut(const GroundTruthModel& m, int i, int j) {
    const int pi = m.pos(i), pj = m.pos(j);
    const int w = detail::lca_pos(m, pi, pj);
    const int g = m.depth[pi] + m.depth[pj] - 2 * m.depth[w];
    return m.params.sigma_r * m.a_pow[g];
}

/// Information distance evaluated from covariance blocks: minus the log of
/// the product of singular values of Sigma_ij, normalized by the marginal
/// determinant magnitudes.
inline double information_distance(const Eigen::MatrixXd& sigma_ij, const Eigen::MatrixXd& sigma_ii,
                                   const Eigen::MatrixXd& sigma_jj) {
    auto log_prod_sv = [](const Eigen::MatrixXd& m) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        double s = 0;
        for (int k = 0; k < svd.singularValues().size(); ++k)
            s += std::log(svd.singularValues()(k));
        return s;
    };
    return -log_prod_sv(sigma_ij) + 0.5 * log_prod_sv(sigma_ii) + 0.5 * log_prod_sv(sigma_jj);
}

inline double exact_distance(const GroundTruthModel& m, int i, int j) {
    if (i == j) return 0.0;
    return information_distance(exact_covariance(m, i, j), exact_covariance(m, i, i),
                                exact_covariance(m, j, j));
}

/// Closed form -0.5 log det((1/alpha^g)(A'A)^g) for the homogeneous family.
inline double exact_distance_closed_form(const GroundTruthModel& m, int i, int j) {
    if (i == j) return 0.0;
    const int pi = m.pos(i), pj = m.pos(j);
    const int w = detail::lca_pos(m, pi, pj);
    const int g = m.depth[pi] + m.depth[pj] - 2 * m.depth[w];
    const Eigen::MatrixXd gram = m.params.A.transpose() * m.params.A / m.params.alpha;
    return -0.5 * std::log(detail::matrix_power(gram, g).determinant());
}

/// -0.5 log det(I - (1/alpha^g)(A'A)^g); requires the homogeneous family.
inline double mutual_information(const GroundTruthModel& m, int i, int j) {
    auto issues = check_model_params(m.params);
    if (!issues.empty())
        throw std::invalid_argument("mutual_information requires the homogeneous family: " +
                                    issues.front());
    if (i == j) return std::numeric_limits<double>::infinity();
    const int pi = m.pos(i), pj = m.pos(j);
    const int w = detail::lca_pos(m, pi, pj);
    const int g = m.depth[pi] + m.depth[pj] - 2 * m.depth[w];
    const int l = m.params.l_max;
    const Eigen::MatrixXd gram = m.params.A.transpose() * m.params.A / m.params.alpha;
    const Eigen::MatrixXd inner =
        Eigen::MatrixXd::Identity(l, l) - detail::matrix_power(gram, g);
    return -0.5 * std::log(inner.determinant());
}

/// Draws n samples of the observed nodes. Deterministic in (model, seed):
/// per sample the nodes are visited in a fixed BFS order, l_max standard
/// normals each.
inline DataMatrix sample(const GroundTruthModel& m, int n, std::uint64_t seed) {
    if (n < 0) throw std::invalid_argument("sample: n must be >= 0");
    const int l = m.params.l_max;
    const int nn = m.tree.node_count();
    const int o = m.tree.observed_count();
    // observed ids must be 0..o-1 for data-matrix alignment
    auto obs = m.tree.observed_ids();
    for (int i = 0; i < o; ++i)
        if (obs[i] != i)
            throw std::invalid_argument("sample: observed ids must be contiguous from 0");

    Eigen::LLT<Eigen::MatrixXd> llt_r(m.params.sigma_r);
    Eigen::LLT<Eigen::MatrixXd> llt_n(m.params.sigma_n);
    if (llt_r.info() != Eigen::Success || llt_n.info() != Eigen::Success)
        throw std::invalid_argument("sample: sigma_r and sigma_n must be positive-definite");
    const Eigen::MatrixXd Lr = llt_r.matrixL();
    const Eigen::MatrixXd Ln = llt_n.matrixL();

    DataMatrix out = DataMatrix::zeros(n, o, l);
    Rng rng(seed);
    std::vector<Eigen::VectorXd> x(nn, Eigen::VectorXd::Zero(l));
    Eigen::VectorXd z(l);
    for (int s = 0; s < n; ++s) {
        for (int u : m.bfs_order) {
            for (int k = 0; k < l; ++k) z(k) = rng.normal();
            if (u == m.root_pos) {
                x[u] = Lr * z;
            } else {
                const double scale = std::pow(m.params.alpha, 0.5 * (m.depth[u] - 1));
                x[u] = m.params.A * x[m.parent[u]] + scale * (Ln * z);
            }
        }
        for (int i = 0; i < o; ++i) {
            const int p = m.pos(i);
            for (int k = 0; k < l; ++k) out.values(s, out.col_index(i, k)) = x[p](k);
        }
    }
    return out;
}

/// Closest observed node in information distance; ties go to the smaller id.
inline int surrogate(const GroundTruthModel& m, int i) {
    auto obs = m.tree.observed_ids();
    if (obs.empty()) throw std::invalid_argument("surrogate: model has no observed nodes");
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j : obs) {
        const double d = exact_distance(m, i, j);
        if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && j < best)) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

/// Contrastive distance of node i: second-closest observed distance (the
/// surrogate excluded) minus the closest.
inline double contrastive_distance(const GroundTruthModel& m, int i) {
    auto obs = m.tree.observed_ids();
    const int sg = surrogate(m, i);
    double dmin = std::numeric_limits<double>::infinity();
    double second = std::numeric_limits<double>::infinity();
    for (int j : obs) {
        const double d = exact_distance(m, i, j);
        dmin = std::min(dmin, d);
        if (j != sg) second = std::min(second, d);
    }
    return second - dmin;
}

/// Minimum contrastive distance over internal (non-leaf) nodes.
inline double delta_mst(const GroundTruthModel& m) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i < m.tree.node_count(); ++i) {
        const int id = m.tree.ids[i];
        if (m.tree.degree(id) < 2) continue;
        any = true;
        best = std::min(best, contrastive_distance(m, id));
    }
    if (!any) throw std::invalid_argument("delta_mst: model has no internal node");
    return best;
}

/// Observable constants of the model class assumptions.
struct AssumptionAudit {
    double gamma_min = 0;     // smallest singular value over all pair covariances
    double delta_min = 0;     // smallest marginal determinant
    double sigma_max_sq = 0;  // largest marginal diagonal entry
    int d_max = 0;            // max node degree
    double rho_min = 0;       // min pairwise information distance
    double rho_max = 0;       // max pairwise information distance
};

inline AssumptionAudit audit_assumptions(const GroundTruthModel& m) {
    AssumptionAudit a;
    a.gamma_min = std::numeric_limits<double>::infinity();
    a.delta_min = std::numeric_limits<double>::infinity();
    a.rho_min = std::numeric_limits<double>::infinity();
    const int n = m.tree.node_count();
    for (int i = 0; i < n; ++i) {
        const int id = m.tree.ids[i];
        a.d_max = std::max(a.d_max, m.tree.degree(id));
        const Eigen::MatrixXd cov = exact_covariance(m, id, id);
        a.delta_min = std::min(a.delta_min, cov.determinant());
        a.sigma_max_sq = std::max(a.sigma_max_sq, cov.diagonal().maxCoeff());
        for (int j = i; j < n; ++j) {
            const int jd = m.tree.ids[j];
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(exact_covariance(m, id, jd));
            a.gamma_min = std::min(a.gamma_min, svd.singularValues().minCoeff());
            if (j > i) {
                const double d = exact_distance(m, id, jd);
                a.rho_min = std::min(a.rho_min, d);
                a.rho_max = std::max(a.rho_max, d);
            }
        }
    }
    return a;
}

}  // namespace latree
