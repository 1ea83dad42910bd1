#include "playerval/forest.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace playerval;
using forest::ForestConfig;
using forest::ForestModel;
using testutil::inner_spec;
using testutil::leaf_spec;

namespace {

features::FeatureTable signal_table(std::size_t n, std::size_t d_noise, Rng& rng,
                                    const std::vector<double>& signal_coefs, double noise_sd) {
    auto t = testutil::random_table(n, signal_coefs.size() + d_noise, rng, /*centered=*/false);
    for (std::size_t r = 0; r < n; ++r) {
        double v = 0.0;
        for (std::size_t c = 0; c < signal_coefs.size(); ++c) v += signal_coefs[c] * t.X.at(r, c);
        t.y[r] = v + noise_sd * rng.normal();
    }
    return t;
}

} // namespace

TEST_CASE("degenerate forest equals a single CART tree") {
    Rng rng(13);
    const auto t = signal_table(60, 3, rng, {2.0, -1.0}, 0.2);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.feature_subset_size = static_cast<int>(t.d());
    cfg.tree.max_depth = 6;
    cfg.seed = 5;
    const auto model = forest::fit_forest(t, cfg);

    Rng tree_rng(split_seed(cfg.seed, 0));
    trees::TreeConfig tree_cfg = cfg.tree;
    tree_cfg.feature_subset_size = static_cast<int>(t.d());
    const auto reference = trees::fit_tree(t.X, t.y, tree_cfg, tree_rng);

    std::vector<double> row(t.d());
    for (std::size_t r = 0; r < t.n(); ++r) {
        row.assign(t.X.row(r), t.X.row(r) + t.d());
        CHECK(forest::predict(model, row) == trees::predict(reference, row));
    }
}

TEST_CASE("forest prediction is the left-to-right mean of tree predictions") {
    // two hand-built stumps predicting 10 and 14 -> 12
    ForestModel model;
    model.trees.resize(2);
    model.trees[0].n_features = 1;
    testutil::append_node(model.trees[0], leaf_spec(10.0));
    model.trees[1].n_features = 1;
    testutil::append_node(model.trees[1], leaf_spec(14.0));
    CHECK(forest::predict(model, {0.0}) == 12.0);

    // identity against a manual left-to-right sum on a fitted ensemble
    Rng rng(17);
    const auto t = signal_table(80, 4, rng, {1.5, -2.0}, 0.3);
    ForestConfig cfg;
    cfg.n_trees = 13;
    cfg.seed = 3;
    const auto fitted = forest::fit_forest(t, cfg);
    std::vector<double> row(t.d());
    for (std::size_t r = 0; r < 10; ++r) {
        row.assign(t.X.row(r), t.X.row(r) + t.d());
        double sum = 0.0;
        for (const auto& tree : fitted.trees) sum += trees::predict(tree, row);
        CHECK(forest::predict(fitted, row) == sum / static_cast<double>(fitted.trees.size()));
    }
}

TEST_CASE("constant target yields stump trees, zero importance, NoSplits flag") {
    Rng rng(19);
    auto t = testutil::random_table(30, 4, rng);
    for (auto& v : t.y) v = 5.0;
    ForestConfig cfg;
    cfg.n_trees = 5;
    cfg.seed = 1;
    const auto model = forest::fit_forest(t, cfg);
    CHECK(model.no_splits);
    for (const auto& tree : model.trees) CHECK(tree.is_stump());
    for (const double imp : model.importance) CHECK(imp == 0.0);
    CHECK_THROWS_AS(forest::forest_feature_importance(model), Error);
}

TEST_CASE("node importance on the hand example") {
    // y = [0,0,10,10] split at 2.5: w=1, V=25, pure children
    const std::vector<std::vector<double>> cols = {{1, 2, 3, 4}};
    const std::vector<double> y = {0, 0, 10, 10};
    trees::TreeConfig cfg;
    cfg.max_depth = 1;
    cfg.min_samples_leaf = 1;
    cfg.min_samples_split = 2;
    Rng rng(1);
    const auto tree = trees::fit_tree(cols, y, {0, 1, 2, 3}, cfg, rng);
    REQUIRE(tree.nodes.size() == 3);
    CHECK(tree.nodes[0].impurity == doctest::Approx(25.0));
    CHECK(forest::node_importance(tree, 0) == doctest::Approx(25.0));
    CHECK_THROWS_AS(forest::node_importance(tree, 1), Error); // leaf

    // a split that failed to reduce impurity is never created, so every
    // inner node's importance is positive
    for (std::size_t i = 0; i < tree.nodes.size(); ++i)
        if (tree.nodes[i].feature >= 0) CHECK(forest::node_importance(tree, static_cast<int>(i)) > 0.0);
}

TEST_CASE("tree feature importance: hand-assigned node weights") {
    // Figure-shaped tree with explicit n_samples and impurities.
    const auto leaves = leaf_spec(0.0, 4, 0.0);
    const auto ll = inner_spec(1, 970, leaves, leaves, 8, 0.1);
    const auto lr = inner_spec(1, 790, leaves, leaves, 8, 0.2);
    const auto rl = inner_spec(1, 450, leaves, leaves, 8, 0.5);
    const auto rr = inner_spec(1, 3100, leaves, leaves, 8, 0.3);
    const auto l = inner_spec(0, 13.25, ll, lr, 16, 0.5);
    const auto r = inner_spec(1, 2120, rl, rr, 16, 2.0);
    const auto root = inner_spec(0, 15.75, l, r, 32, 3.0);
    trees::Tree tree;
    tree.n_features = 2;
    testutil::append_node(tree, root);

    // node importances: root 1.75, L 0.175, R 0.8, LL 0.025, LR 0.05,
    // RL 0.125, RR 0.075; total 3.0
    const auto imp = forest::tree_feature_importance(tree, 2);
    CHECK(imp[0] == doctest::Approx(1.925 / 3.0).epsilon(1e-12));
    CHECK(imp[1] == doctest::Approx(1.075 / 3.0).epsilon(1e-12));
    CHECK(imp[0] + imp[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tree importance is concentrated on the split feature") {
    const std::vector<std::vector<double>> cols = {{5, 5, 5, 5}, {5, 5, 5, 5}, {5, 5, 5, 5}, {1, 2, 3, 4}};
    const std::vector<double> y = {0, 0, 10, 10};
    trees::TreeConfig cfg;
    cfg.min_samples_leaf = 1;
    cfg.min_samples_split = 2;
    Rng rng(1);
    const auto tree = trees::fit_tree(cols, y, {0, 1, 2, 3}, cfg, rng);
    const auto imp = forest::tree_feature_importance(tree, 4);
    CHECK(imp == std::vector<double>{0.0, 0.0, 0.0, 1.0});

    trees::Tree stump;
    stump.n_features = 4;
    testutil::append_node(stump, leaf_spec(1.0, 4, 0.0));
    CHECK_THROWS_AS(forest::tree_feature_importance(stump, 4), Error);
}

TEST_CASE("forest importance: nonnegative, sums to 1, zero off-support") {
    Rng rng(23);
    const auto t = signal_table(200, 6, rng, {3.0, -2.0}, 0.25);
    ForestConfig cfg;
    cfg.n_trees = 40;
    cfg.tree.max_depth = 5;
    cfg.seed = 9;
    const auto model = forest::fit_forest(t, cfg);
    double total = 0.0;
    for (const double v : model.importance) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(forest::forest_feature_importance(model) == model.importance);

    // identical trees (no bootstrap, full subset) -> forest importance
    // equals the single tree's
    ForestConfig same;
    same.n_trees = 4;
    same.bootstrap = false;
    same.feature_subset_size = static_cast<int>(t.d());
    same.seed = 1;
    const auto clones = forest::fit_forest(t, same);
    const auto single = forest::tree_feature_importance(clones.trees[0], t.d());
    for (std::size_t j = 0; j < t.d(); ++j)
        CHECK(clones.importance[j] == doctest::Approx(single[j]).epsilon(1e-12));
}

TEST_CASE("planted signal dominates noise importance (small-scale)") {
    for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Rng rng(seed * 1000 + 7);
        const auto t = signal_table(400, 8, rng, {3.0, -2.0, 1.5}, 0.4);
        ForestConfig cfg;
        cfg.n_trees = 40;
        cfg.tree.max_depth = 6;
        cfg.seed = seed;
        const auto model = forest::fit_forest(t, cfg);
        double weakest_signal = 1.0, strongest_noise = 0.0;
        for (std::size_t j = 0; j < t.d(); ++j) {
            if (j < 3) weakest_signal = std::min(weakest_signal, model.importance[j]);
            else strongest_noise = std::max(strongest_noise, model.importance[j]);
        }
        CHECK(weakest_signal > strongest_noise);
    }
}

TEST_CASE("seed determinism and serial/parallel equivalence") {
    Rng rng(29);
    const auto t = signal_table(150, 5, rng, {2.0, -1.0}, 0.3);
    ForestConfig cfg;
    cfg.n_trees = 16;
    cfg.seed = 77;

    auto serial = cfg, parallel = cfg;
    serial.n_threads = 1;
    parallel.n_threads = 0;
    const auto a = forest::fit_forest(t, serial);
    const auto b = forest::fit_forest(t, parallel);
    const auto c = forest::fit_forest(t, serial);
    CHECK(forest::to_json(a) == forest::to_json(b));
    CHECK(forest::to_json(a) == forest::to_json(c));

    auto other = cfg;
    other.seed = 78;
    CHECK(forest::to_json(forest::fit_forest(t, other)) != forest::to_json(a));
}

TEST_CASE("forest JSON round trip") {
    Rng rng(31);
    const auto t = signal_table(60, 3, rng, {1.0}, 0.2);
    ForestConfig cfg;
    cfg.n_trees = 6;
    cfg.seed = 2;
    const auto model = forest::fit_forest(t, cfg);
    const auto back = forest::forest_from_json(forest::to_json(model));
    CHECK(forest::to_json(back) == forest::to_json(model));
    std::vector<double> row(t.d());
    row.assign(t.X.row(0), t.X.row(0) + t.d());
    CHECK(forest::predict(back, row) == forest::predict(model, row));
}
