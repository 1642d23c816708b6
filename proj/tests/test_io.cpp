#include <catch2/catch.hpp>
#include <cstdio>

#include "latree/io.hpp"

using namespace latree;

TEST_CASE("model json round trip") {
    const auto model = make_archetype_model(Archetype::double_binary, 5, 0.3, 2, 1.1);
    const json j = model_to_json(model);
    const auto back = model_from_json(j);
    CHECK(back.tree.ids == model.tree.ids);
    CHECK(back.tree.edges == model.tree.edges);
    CHECK(back.tree.root == model.tree.root);
    CHECK((back.params.A - model.params.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.params.alpha == model.params.alpha);
    // schema fields named as documented
    CHECK(j.contains("tree"));
    CHECK(j["tree"].contains("nodes"));
    CHECK(j["tree"].contains("edges"));
    CHECK(j["tree"].contains("root"));
    CHECK(j["params"].contains("A"));
    CHECK(j["params"].contains("sigma_r"));
    CHECK(j["params"].contains("sigma_n"));
}

TEST_CASE("json errors carry the offending field") {
    json j = {{"tree", {{"nodes", json::array()}}}};
    CHECK_THROWS_WITH(model_from_json(j), Catch::Contains("params"));
    json t = {{"nodes", {{{"id", 0}, {"kind", "seen"}}}}, {"edges", json::array()}};
    CHECK_THROWS_WITH(tree_from_json(t), Catch::Contains("kind"));
}

TEST_CASE("data csv and binary round trips") {
    const auto model = make_archetype_model(Archetype::hmm, 4, 0.24, 2, 1.0);
    const DataMatrix x = sample(model, 37, 5);
    write_data_csv(x, "io_data.csv");
    const DataMatrix via_csv = read_data_csv("io_data.csv");
    CHECK(via_csv.n == x.n);
    CHECK(via_csv.o == x.o);
    CHECK(via_csv.l_max == x.l_max);
    CHECK(via_csv.values == x.values);  // %.17g preserves doubles exactly
    write_data_binary(x, "io_data.bin");
    const DataMatrix via_bin = read_data_binary("io_data.bin", x.l_max);
    CHECK(via_bin.values == x.values);
    CHECK(via_bin.o == x.o);
    std::remove("io_data.csv");
    std::remove("io_data.bin");
    CHECK_THROWS_AS(read_data_csv("no_such_file.csv"), std::runtime_error);
}

TEST_CASE("distance matrix json and text round trips") {
    const auto model = make_archetype_model(Archetype::hmm, 5, 0.3, 1, 1.0);
    const DataMatrix x = sample(model, 500, 9);
    DistanceMatrix d = distance_matrix(x, 8);
    const DistanceMatrix via_json = distance_matrix_from_json(distance_matrix_to_json(d));
    CHECK(via_json.labels == d.labels);
    CHECK(via_json.values == d.values);
    CHECK(via_json.flag.to_string() == d.flag.to_string());
    CHECK(via_json.saturated == d.saturated);
    write_distance_text(d, "io_dist.txt");
    const DistanceMatrix via_text = read_distance_text("io_dist.txt");
    CHECK(via_text.labels == d.labels);
    CHECK(via_text.values == d.values);
    std::remove("io_dist.txt");
}

TEST_CASE("learned tree json round trip keeps provenance") {
    const auto model = make_archetype_model(Archetype::hmm, 6, 0.3, 1, 1.0);
    const LearnedTree t = clrg_learn(exact_distance_matrix(model));
    const LearnedTree back = learned_tree_from_json(learned_tree_to_json(t));
    CHECK(back.tree.ids == t.tree.ids);
    CHECK(back.tree.edges == t.tree.edges);
    CHECK(back.observed_labels == t.observed_labels);
    CHECK(back.provenance.algorithm == "clrg");
    CHECK(back.provenance.epsilon == t.provenance.epsilon);
    CHECK(back.distances.size() == t.distances.size());
}

TEST_CASE("corruption spec json round trip") {
    CorruptionSpec s;
    s.pattern = CorruptionPattern::double_binary_outliers;
    s.n1 = 12;
    s.amplitude = 60;
    s.seed = 99;
    s.alt_model = make_archetype_model(Archetype::double_binary, 3, 0.5, 1, 1.0);
    const CorruptionSpec back = corruption_spec_from_json(corruption_spec_to_json(s));
    CHECK(back.pattern == s.pattern);
    CHECK(back.n1 == s.n1);
    CHECK(back.seed == s.seed);
    REQUIRE(back.alt_model.has_value());
    CHECK(back.alt_model->tree.ids == s.alt_model->tree.ids);
}

TEST_CASE("bound params json round trip") {
    BoundParams p;
    p.l_max = 3;
    p.rho_min = 0.24;
    p.rho_max = 4.8;
    p.v_obs = 21;
    p.iterations = 2;
    p.delta_mst = 0.24;
    const BoundParams back = bound_params_from_json(bound_params_to_json(p));
    CHECK(back.l_max == p.l_max);
    CHECK(back.rho_min == p.rho_min);
    CHECK(back.rho_max == p.rho_max);
    CHECK(back.v_obs == p.v_obs);
    CHECK(back.iterations == p.iterations);
    CHECK(back.delta_mst == p.delta_mst);
}
