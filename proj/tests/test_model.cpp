#include <catch2/catch.hpp>
#include <cmath>

#include "latree/estimate.hpp"
#include "latree/model.hpp"
#include "latree/random.hpp"

using namespace latree;


namespace {

// random symmetric commuting (A, sigma_r) pair plus a free SPD noise; used by
// the additivity suite, which does not require homogeneity
ModelParams random_commuting_params(Rng& rng, int l_max) {
    Eigen::MatrixXd g(l_max, l_max);
    for (int i = 0; i < l_max; ++i)
        for (int j = 0; j < l_max; ++j) g(i, j) = rng.normal();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd v = qr.householderQ();
    Eigen::VectorXd a_eigs(l_max), s_eigs(l_max);
    for (int i = 0; i < l_max; ++i) {
        a_eigs(i) = rng.uniform(0.4, 0.9) * (rng.uniform01() < 0.3 ? -1.0 : 1.0);
        s_eigs(i) = rng.uniform(0.5, 2.0);
    }
    ModelParams p;
    p.l_max = l_max;
    p.alpha = rng.uniform(0.8, 1.25);
    p.A = v * a_eigs.asDiagonal() * v.transpose();
    p.sigma_r = v * s_eigs.asDiagonal() * v.transpose();
    Eigen::MatrixXd b(l_max, l_max);
    for (int i = 0; i < l_max; ++i)
        for (int j = 0; j < l_max; ++j) b(i, j) = rng.normal();
    p.sigma_n = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(l_max, l_max);
    return p;
}

LatentTree random_tree(Rng& rng, int n_nodes) {
    LatentTree t;
    for (int i = 0; i < n_nodes; ++i) {
        t.ids.push_back(i);
        t.kinds.push_back(NodeKind::observed);
        if (i > 0) t.edges.emplace_back(static_cast<int>(rng.below(i)), i);
    }
    t.root = 0;
    return t;
}

}  // namespace

TEST_CASE("make_homogeneous_params matches the isotropic closed form") {
    const ModelParams p = make_homogeneous_params(3, 0.24, 1.0);
    const double lam = std::exp(-0.08);
    CHECK(p.A(0, 0) == Approx(lam).epsilon(1e-12));
    CHECK(p.A(1, 1) == Approx(lam).epsilon(1e-12));
    CHECK(p.A(0, 1) == 0.0);
    CHECK(p.sigma_n(0, 0) == Approx(1.0 - std::exp(-0.16)).epsilon(1e-12));
    CHECK(check_model_params(p).empty());

    const ModelParams q = make_homogeneous_params(1, std::log(2.0), 1.0);
    CHECK(q.A(0, 0) == Approx(0.5).epsilon(1e-12));
    CHECK(q.sigma_n(0, 0) == Approx(0.75).epsilon(1e-12));

    // homogeneity residual is exactly zero for the isotropic family
    for (const ModelParams* mp : {&p, &q}) {
        const Eigen::MatrixXd res =
            mp->A * mp->sigma_r * mp->A.transpose() + mp->sigma_n - mp->alpha * mp->sigma_r;
        CHECK(res.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("model invariant checks reject broken parameters") {
    ModelParams p = make_homogeneous_params(2, 0.3, 1.0);
    p.sigma_n(0, 0) += 0.1;  // breaks homogeneity
    CHECK_FALSE(check_model_params(p).empty());
    ModelParams q = make_homogeneous_params(2, 0.3, 1.0);
    q.A(0, 0) = 1.5;  // eigenvalue of A'A/alpha leaves (0,1), homogeneity breaks
    CHECK_FALSE(check_model_params(q).empty());
}

TEST_CASE("exact covariance closed forms") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.24, 2, 1.0);
    const double lam = std::exp(-0.12);
    // depth-0 equals sigma_r at the root
    const Eigen::MatrixXd root_cov = exact_covariance(model, model.tree.root, model.tree.root);
    CHECK((root_cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    // adjacent nodes: lambda I; distance 2: lambda^2 I
    const Eigen::MatrixXd adj = exact_covariance(model, 0, model.tree.root);
    CHECK((adj - lam * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd two = exact_covariance(model, 0, 1);
    CHECK((two - lam * lam * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    // shortcut agrees with the recursion on the alpha = 1 symmetric family
    for (int i : {0, 1, 2})
        for (int j : {3, 4}) {
            const Eigen::MatrixXd a = exact_covariance(model, i, j);
            const Eigen::MatrixXd b = covariance_shortcut(model, i, j);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("node covariance scales as alpha^depth") {
    const auto model = make_archetype_model(Archetype::double_binary, 5, 0.4, 2, 1.3);
    for (int i = 0; i < model.tree.node_count(); ++i) {
        const int id = model.tree.ids[i];
        const Eigen::MatrixXd cov = exact_covariance(model, id, id);
        const double scale = std::pow(model.params.alpha, model.depth[model.pos(id)]);
        CHECK((cov - scale * model.params.sigma_r).cwiseAbs().maxCoeff() <
              1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("exact distance examples") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.24, 3, 1.0);
    CHECK(exact_distance(model, 2, 2) == 0.0);
    // adjacent tree nodes realize the requested per-edge distance
    const int v1 = 5;  // first hidden backbone node
    CHECK(exact_distance(model, 0, v1) == Approx(0.24).epsilon(1e-9));
    // graph distance 2, and additivity against the closed form
    CHECK(exact_distance(model, 0, 1) == Approx(0.48).epsilon(1e-9));
    CHECK(exact_distance_closed_form(model, 0, 1) == Approx(0.48).epsilon(1e-9));
}

TEST_CASE("mutual information closed form and monotonicity") {
    const auto model = make_archetype_model(Archetype::hmm, 10, std::log(2.0), 1, 1.0);
    // A = [0.5]: g = 1 -> -log(1 - 0.25)/2, g = 2 -> -log(1 - 0.0625)/2
    const int v1 = 11;
    CHECK(mutual_information(model, 0, v1) == Approx(0.14384103622589045).epsilon(1e-9));
    CHECK(mutual_information(model, 0, 1) == Approx(0.032269260560108674).epsilon(1e-9));
    // monotone decay in graph distance, distances increase
    double prev_mi = mutual_information(model, 0, 1);
    double prev_d = exact_distance(model, 0, 1);
    for (int j = 2; j <= 9; ++j) {
        const double mi = mutual_information(model, 0, j);
        const double d = exact_distance(model, 0, j);
        CHECK(mi < prev_mi);
        CHECK(d > prev_d);
        prev_mi = mi;
        prev_d = d;
    }
    // far apart: vanishing information
    CHECK(mutual_information(model, 0, 10) < mutual_information(model, 0, 5));

    ModelParams bad = make_homogeneous_params(2, 0.3, 1.0);
    bad.sigma_n(0, 1) += 0.05;
    bad.sigma_n(1, 0) += 0.05;
    auto m2 = make_model(build_hmm(4), bad);
    CHECK_THROWS_AS(mutual_information(m2, 0, 1), std::invalid_argument);
}

TEST_CASE("additivity holds on random channel trees") {
    Rng rng(20240817);
    for (int trial = 0; trial < 40; ++trial) {
        const int l_max = 1 + static_cast<int>(rng.below(3));
        const int nodes = 4 + static_cast<int>(rng.below(12));
        ModelParams p = random_commuting_params(rng, l_max);
        const auto model = make_model(random_tree(rng, nodes), p);
        for (int rep = 0; rep < 10; ++rep) {
            const int i = static_cast<int>(rng.below(nodes));
            const int k = static_cast<int>(rng.below(nodes));
            if (i == k) continue;
            const auto path = tree_path(model.tree, i, k);
            const double dik = exact_distance(model, i, k);
            for (size_t m = 1; m + 1 < path.size(); ++m) {
                const double lhs = exact_distance(model, i, path[m]) +
                                   exact_distance(model, path[m], k);
                CHECK(std::abs(dik - lhs) < 1e-9 * std::max(1.0, std::abs(dik)));
            }
        }
    }
}

TEST_CASE("sampler determinism and trivial cases") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.24, 2, 1.0);
    const DataMatrix empty = sample(model, 0, 7);
    CHECK(empty.n == 0);
    CHECK(empty.cols() == 5 * 2);
    const DataMatrix a = sample(model, 50, 42);
    const DataMatrix b = sample(model, 50, 42);
    CHECK(a.values == b.values);
    const DataMatrix c = sample(model, 50, 43);
    CHECK(a.values != c.values);
    // prefix property: the first rows of a longer draw match the short draw
    const DataMatrix big = sample(model, 80, 42);
    CHECK(big.values.topRows(50) == a.values);
}

TEST_CASE("sampler second moments approach the exact covariance") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.24, 1, 1.0);
    const int n = 200000;
    const DataMatrix x = sample(model, n, 99);
    const Eigen::MatrixXd emp = x.values.transpose() * x.values / n;
    // closest observed pair (graph distance 2)
    const double truth = exact_covariance(model, 0, 1)(0, 0);
    CHECK(std::abs(emp(0, 1) - truth) < 0.02);
    CHECK(std::abs(emp(0, 0) - 1.0) < 0.02);
}

TEST_CASE("sampler error shrinks like the square root of n") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.3, 1, 1.0);
    const int n1 = 4000, n2 = 64000;  // 4x expected error ratio
    double err1 = 0, err2 = 0;
    const int reps = 5;
    for (int r = 0; r < reps; ++r) {
        const DataMatrix xa = sample(model, n1, 1000 + r);
        const DataMatrix xb = sample(model, n2, 2000 + r);
        const Eigen::MatrixXd ca = xa.values.transpose() * xa.values / n1;
        const Eigen::MatrixXd cb = xb.values.transpose() * xb.values / n2;
        Eigen::MatrixXd truth(xa.cols(), xa.cols());
        for (int i = 0; i < xa.o; ++i)
            for (int j = 0; j < xa.o; ++j) truth(i, j) = exact_covariance(model, i, j)(0, 0);
        err1 += (ca - truth).norm();
        err2 += (cb - truth).norm();
    }
    const double ratio = err1 / err2;
    const double expected = std::sqrt(static_cast<double>(n2) / n1);
    CHECK(ratio > 0.4 * expected);
    CHECK(ratio < 2.5 * expected);
}

TEST_CASE("surrogate nodes") {
    const auto model = make_archetype_model(Archetype::hmm, 6, 0.24, 1, 1.0);
    // observed nodes are their own surrogate
    CHECK(surrogate(model, 3) == 3);
    // a middle backbone node is closest to its own leaf
    const int v3 = 6 + 3;  // backbone v_3 of the diameter-6 chain
    CHECK(surrogate(model, v3) == 3);
    // the first backbone node ties between the end and its leaf: lower id wins
    const int v1 = 6 + 1;
    CHECK(surrogate(model, v1) == 0);
}

TEST_CASE("delta_mst follows the contrastive-distance definition") {
    // uniform hmm: end backbone nodes tie between two observed neighbors at
    // rho, so the minimum contrastive gap vanishes
    const auto hmm = make_archetype_model(Archetype::hmm, 4, 0.24, 1, 1.0);
    CHECK(delta_mst(hmm) == Approx(0.0).margin(1e-12));

    // interior nodes alone have gap rho (leaf at rho, next observed at 2 rho)
    const int v2 = 4 + 2;
    CHECK(contrastive_distance(hmm, v2) == Approx(0.24).epsilon(1e-9));

    // fully observed chain: every internal node is its own surrogate and the
    // nearest other observed node sits one edge away
    LatentTree chain;
    chain.ids = {0, 1, 2};
    chain.kinds = {NodeKind::observed, NodeKind::observed, NodeKind::observed};
    chain.edges = {{0, 1}, {1, 2}};
    chain.root = 1;
    const auto fully = make_model(chain, make_homogeneous_params(1, 0.3, 1.0));
    CHECK(delta_mst(fully) == Approx(0.3).epsilon(1e-9));
}

TEST_CASE("assumption audit on archetypes") {
    for (auto kind : {Archetype::hmm, Archetype::double_binary, Archetype::full_m_tree,
                      Archetype::double_star}) {
        const int size = kind == Archetype::double_binary ? 5
                         : kind == Archetype::full_m_tree ? 2
                                                          : 4;
        const auto model = make_archetype_model(kind, size, 0.24, 2, 1.0);
        const auto a = audit_assumptions(model);
        CHECK(a.gamma_min > 0);
        CHECK(a.delta_min > 0);
        CHECK(a.sigma_max_sq > 0);
        CHECK(a.d_max >= 3);
        CHECK(a.rho_min == Approx(0.24).epsilon(1e-9));
        CHECK(a.rho_max == Approx(0.24 * tree_diameter(model.tree)).epsilon(1e-9));
    }
}
