#include "playerval/evaluation.hpp"
#include "playerval/stats_util.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace playerval;
using eval::ModelSpec;

namespace {

features::FeatureTable linear_table(std::size_t n, std::size_t d, double noise_sd, Rng& rng) {
    auto t = testutil::random_table(n, d, rng, /*centered=*/false);
    for (std::size_t r = 0; r < n; ++r) {
        double v = 1.0;
        for (std::size_t c = 0; c < d; ++c) v += (c % 2 ? -1.0 : 1.0) * (c + 1) * t.X.at(r, c);
        t.y[r] = v + noise_sd * rng.normal();
    }
    return t;
}

ModelSpec lasso_spec(double lambda) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Lasso;
    spec.lasso.lambda = lambda;
    return spec;
}

} // namespace

TEST_CASE("kfold sizes, disjointness, coverage, determinism") {
    {
        const auto folds = eval::kfold_split(10, 5, 42);
        for (const auto& f : folds) CHECK(f.size() == 2);
    }
    {
        const auto folds = eval::kfold_split(11, 5, 42);
        std::multiset<std::size_t> sizes;
        for (const auto& f : folds) sizes.insert(f.size());
        CHECK(sizes == std::multiset<std::size_t>{3, 2, 2, 2, 2});
    }
    {
        const auto a = eval::kfold_split(37, 5, 7);
        const auto b = eval::kfold_split(37, 5, 7);
        CHECK(a == b);
        std::set<std::size_t> seen;
        for (const auto& f : a)
            for (const auto i : f) CHECK(seen.insert(i).second);
        CHECK(seen.size() == 37);
    }
    CHECK_THROWS_AS(eval::kfold_split(3, 5, 1), Error);
    CHECK_THROWS_AS(eval::kfold_split(10, 1, 1), Error);
}

TEST_CASE("fold normalization never sees held-out rows") {
    Rng rng(55);
    auto raw = testutil::random_table(20, 3, rng, /*centered=*/false);
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < 15; ++i) train_idx.push_back(i);
    for (std::size_t i = 15; i < 20; ++i) test_idx.push_back(i);

    const auto fold = eval::evaluate_fold(raw, train_idx, test_idx, lasso_spec(0.01));
    const auto expected = features::normalize(eval::subset_rows(raw, train_idx));
    REQUIRE(fold.norm_stats.size() == expected.norm_stats.size());
    for (std::size_t c = 0; c < fold.norm_stats.size(); ++c) {
        CHECK(fold.norm_stats[c].mean == expected.norm_stats[c].mean);
        CHECK(fold.norm_stats[c].scale == expected.norm_stats[c].scale);
    }

    // corrupting the held-out rows must not move the fold statistics
    auto corrupted = raw;
    for (const auto r : test_idx)
        for (std::size_t c = 0; c < raw.d(); ++c) corrupted.X.at(r, c) *= 1000.0;
    const auto fold2 = eval::evaluate_fold(corrupted, train_idx, test_idx, lasso_spec(0.01));
    for (std::size_t c = 0; c < fold.norm_stats.size(); ++c) {
        CHECK(fold2.norm_stats[c].mean == fold.norm_stats[c].mean);
        CHECK(fold2.norm_stats[c].scale == fold.norm_stats[c].scale);
    }
}

TEST_CASE("cross validation aggregates fold MSEs and the R2 identity holds") {
    Rng rng(65);
    const auto raw = linear_table(60, 4, 0.5, rng);
    const auto report = eval::cross_validate(raw, lasso_spec(0.05), 5, 99);

    CHECK(report.fold_mses.size() == 5);
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < 5; ++f) {
        weighted += report.fold_mses[f] * static_cast<double>(report.fold_sizes[f]);
        total += report.fold_sizes[f];
    }
    CHECK(total == raw.n());
    CHECK(report.mse_cv == doctest::Approx(weighted / 60.0).epsilon(1e-12));
    CHECK(report.r2_cv == 1.0 - report.mse_cv / population_variance(raw.y));
}

TEST_CASE("constant predictor scores r2 near zero; noiseless linear data near one") {
    Rng rng(75);
    {
        const auto raw = linear_table(80, 3, 1.0, rng);
        // lambda far above lambda_max: every fold predicts its training mean
        const auto report = eval::cross_validate(raw, lasso_spec(1e6), 5, 3);
        CHECK(report.r2_cv <= 0.05);
        CHECK(report.r2_cv >= -0.25);
    }
    {
        const auto raw = linear_table(80, 3, 0.0, rng);
        const auto report = eval::cross_validate(raw, lasso_spec(1e-8), 5, 3);
        CHECK(report.r2_cv == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("memorizing tree overfits: zero train error, positive out-of-fold error") {
    Rng rng(85);
    const auto raw = linear_table(60, 3, 0.8, rng);

    ModelSpec memorizer;
    memorizer.kind = ModelSpec::Kind::Forest;
    memorizer.forest.n_trees = 1;
    memorizer.forest.bootstrap = false;
    memorizer.forest.feature_subset_size = 3;
    memorizer.forest.tree.max_depth = 64;
    memorizer.forest.tree.min_samples_leaf = 1;
    memorizer.forest.tree.min_samples_split = 2;
    memorizer.forest.seed = 1;

    const auto normalized = features::normalize(raw);
    const auto model = forest::fit_forest(normalized, memorizer.forest);
    double train_mse = 0.0;
    std::vector<double> row(raw.d());
    for (std::size_t r = 0; r < raw.n(); ++r) {
        row.assign(normalized.X.row(r), normalized.X.row(r) + raw.d());
        const double err = raw.y[r] - forest::predict(model, row);
        train_mse += err * err;
    }
    CHECK(train_mse / static_cast<double>(raw.n()) == doctest::Approx(0.0).epsilon(1e-18));

    const auto report = eval::cross_validate(raw, memorizer, 5, 7);
    CHECK(report.mse_cv > 0.1);
}

TEST_CASE("grid search picks the best r2 and breaks ties by order") {
    Rng rng(95);
    const auto raw = linear_table(60, 4, 0.3, rng);
    {
        const auto result = eval::grid_search(raw, {lasso_spec(0.02)}, 5, 1);
        CHECK(result.best_index == 0);
        CHECK(result.reports.size() == 1);
    }
    {
        // the sensible configuration beats the absurd penalty
        const auto result = eval::grid_search(raw, {lasso_spec(1e6), lasso_spec(0.02)}, 5, 1);
        CHECK(result.best_index == 1);
    }
    {
        // exact tie (identical specs): first grid point wins
        const auto result = eval::grid_search(raw, {lasso_spec(0.02), lasso_spec(0.02)}, 5, 1);
        CHECK(result.best_index == 0);
        CHECK(result.reports[0].r2_cv == result.reports[1].r2_cv);
    }
}

TEST_CASE("cross_validate rejects pre-normalized tables") {
    Rng rng(105);
    const auto raw = linear_table(30, 3, 0.2, rng);
    const auto normalized = features::normalize(raw);
    CHECK_THROWS_AS(eval::cross_validate(normalized, lasso_spec(0.01), 5, 1), Error);
}
