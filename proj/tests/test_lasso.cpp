#include "playerval/lasso.hpp"

#include "helpers.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace playerval;
using lasso::LassoConfig;
using lasso::ObjectiveScaling;

namespace {

features::FeatureTable table_from(const Matrix& X, const std::vector<double>& y) {
    features::FeatureTable t;
    t.X = X;
    t.y = y;
    for (std::size_t c = 0; c < X.cols; ++c) {
        t.columns.push_back("x" + std::to_string(c));
        t.kinds.push_back(features::ColumnKind::Continuous);
    }
    t.player_ids.assign(X.rows, 0);
    return t;
}

double kkt_violation(const Matrix& X, const std::vector<double>& y, const lasso::LassoModel& m) {
    const std::size_t n = X.rows, d = X.cols;
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = m.intercept;
        for (std::size_t j = 0; j < d; ++j) pred += X.at(i, j) * m.coefficients[j];
        residual[i] = y[i] - pred;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += X.at(i, j) * residual[i];
        const double grad = m.objective_scaling == ObjectiveScaling::Sum ? -2.0 * dot
                                                                         : -dot / static_cast<double>(n);
        if (m.coefficients[j] != 0.0)
            worst = std::max(worst, std::abs(grad + m.lambda * (m.coefficients[j] > 0 ? 1.0 : -1.0)));
        else
            worst = std::max(worst, std::max(0.0, std::abs(grad) - m.lambda));
    }
    return worst;
}

} // namespace

TEST_CASE("soft threshold") {
    CHECK(lasso::soft_threshold(0.5, 1.0) == 0.0);
    CHECK(lasso::soft_threshold(2.0, 0.5) == 1.5);
    CHECK(lasso::soft_threshold(-2.0, 0.5) == -1.5);
    CHECK(lasso::soft_threshold(0.0, 0.0) == 0.0);
}

TEST_CASE("lambda_max: constant target and the 1-d closed form") {
    Matrix X(2, 1);
    X.at(0, 0) = -1.0;
    X.at(1, 0) = 1.0;

    CHECK(lasso::lambda_max(X, {3.0, 3.0}, ObjectiveScaling::Sum) == 0.0);

    // x = [-1,1], y = [-1,1]: under the plain sum-of-squares objective the
    // 1-d solution is soft(x.y, lambda/2) / (x.x), zero exactly when
    // lambda >= 2|x.y| = 4
    const std::vector<double> y = {-1.0, 1.0};
    CHECK(lasso::lambda_max(X, y, ObjectiveScaling::Sum) == doctest::Approx(4.0));
    for (const double lambda : {0.5, 2.0, 3.9}) {
        const double closed_form = lasso::soft_threshold(2.0, lambda / 2.0) / 2.0;
        LassoConfig cfg;
        cfg.lambda = lambda;
        cfg.objective_scaling = ObjectiveScaling::Sum;
        const auto model = lasso::fit_lasso(X, y, {"x"}, cfg);
        CHECK(model.coefficients[0] == doctest::Approx(closed_form).epsilon(1e-10));
    }

    // at 1.01 * lambda_max every coefficient is zero and alpha = mean(y)
    Rng rng(21);
    auto t = testutil::random_table(25, 6, rng);
    for (const auto scaling : {ObjectiveScaling::Sum, ObjectiveScaling::Mean}) {
        LassoConfig cfg;
        cfg.objective_scaling = scaling;
        cfg.lambda = 1.01 * lasso::lambda_max(t.X, t.y, scaling);
        const auto model = lasso::fit_lasso(t, cfg);
        CHECK(model.converged);
        CHECK(model.active_set.empty());
        CHECK(model.intercept == mean_of(t.y));
        for (const double b : model.coefficients) CHECK(b == 0.0);
    }
}

TEST_CASE("lambda = 0 matches the normal-equations solution") {
    Rng rng(31);
    const auto t = testutil::random_table(20, 5, rng);
    LassoConfig cfg;
    cfg.lambda = 0.0;
    cfg.tol = 1e-12;
    cfg.max_sweeps = 20000;
    const auto model = lasso::fit_lasso(t, cfg);
    const auto expected = testutil::ols_normal_equations(t.X, t.y);
    for (std::size_t j = 0; j < expected.size(); ++j)
        CHECK(model.coefficients[j] == doctest::Approx(expected[j]).epsilon(1e-6));
}

TEST_CASE("coordinate descent matches the sign-enumeration oracle") {
    Rng rng(41);
    for (const auto scaling : {ObjectiveScaling::Mean, ObjectiveScaling::Sum}) {
        const auto t = testutil::random_table(10, 4, rng);
        const double lambda = scaling == ObjectiveScaling::Sum ? 0.3 : 0.3 / 10.0;
        LassoConfig cfg;
        cfg.lambda = lambda;
        cfg.objective_scaling = scaling;
        const auto model = lasso::fit_lasso(t, cfg);
        const auto oracle = testutil::lasso_sign_oracle(t.X, t.y, lambda, scaling);
        REQUIRE(oracle.has_value());
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(model.coefficients[j] == doctest::Approx((*oracle)[j]).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("KKT residuals within 10*tol on converged fits") {
    Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = testutil::random_table(15 + trial, 5, rng);
        LassoConfig cfg;
        cfg.lambda = 0.05 * (trial + 1) / 10.0;
        cfg.objective_scaling = trial % 2 ? ObjectiveScaling::Sum : ObjectiveScaling::Mean;
        const auto model = lasso::fit_lasso(t, cfg);
        REQUIRE(model.converged);
        CHECK(kkt_violation(t.X, t.y, model) <= 10.0 * cfg.tol);
    }
}

TEST_CASE("objective is non-increasing across sweeps") {
    Rng rng(61);
    const auto t = testutil::random_table(30, 8, rng);
    LassoConfig cfg;
    cfg.lambda = 0.02;
    cfg.track_objective = true;
    const auto model = lasso::fit_lasso(t, cfg);
    REQUIRE(model.objective_trace.size() >= 2);
    for (std::size_t s = 1; s < model.objective_trace.size(); ++s)
        CHECK(model.objective_trace[s] <= model.objective_trace[s - 1] + 1e-12);
}

TEST_CASE("scaling y (and lambda) scales the solution") {
    Rng rng(71);
    const double c = 3.5;
    for (const auto scaling : {ObjectiveScaling::Sum, ObjectiveScaling::Mean}) {
        const auto t = testutil::random_table(20, 5, rng);
        auto scaled = t;
        for (auto& v : scaled.y) v *= c;
        LassoConfig cfg;
        cfg.lambda = 0.1;
        cfg.objective_scaling = scaling;
        LassoConfig cfg_scaled = cfg;
        cfg_scaled.lambda = c * cfg.lambda;
        const auto base = lasso::fit_lasso(t, cfg);
        const auto big = lasso::fit_lasso(scaled, cfg_scaled);
        CHECK(big.intercept == doctest::Approx(c * base.intercept).epsilon(1e-9));
        for (std::size_t j = 0; j < 5; ++j)
            CHECK(big.coefficients[j] == doctest::Approx(c * base.coefficients[j]).epsilon(1e-7).scale(1e-9));
    }
}

TEST_CASE("permuting columns permutes the coefficients") {
    Rng rng(81);
    const auto t = testutil::random_table(18, 5, rng);
    auto reversed = t;
    for (std::size_t r = 0; r < t.n(); ++r)
        for (std::size_t c = 0; c < t.d(); ++c) reversed.X.at(r, c) = t.X.at(r, t.d() - 1 - c);
    LassoConfig cfg;
    cfg.lambda = 0.05;
    cfg.tol = 1e-13; // near-exact solve; visit order must not matter at the optimum
    cfg.max_sweeps = 50000;
    const auto a = lasso::fit_lasso(t, cfg);
    const auto b = lasso::fit_lasso(reversed, cfg);
    for (std::size_t j = 0; j < t.d(); ++j)
        CHECK(a.coefficients[j] == doctest::Approx(b.coefficients[t.d() - 1 - j]).epsilon(1e-8).scale(1e-12));
}

TEST_CASE("predict") {
    lasso::LassoModel m;
    m.intercept = 3.0;
    m.coefficients = {1.0, -2.0};
    CHECK(lasso::predict(m, {0.5, 0.25}) == doctest::Approx(3.0));
    CHECK(lasso::predict(m, {0.0, 0.0}) == 3.0);
    CHECK_THROWS_AS(lasso::predict(m, {1.0}), Error);

    lasso::LassoModel zero;
    zero.intercept = 7.0;
    zero.coefficients = {0.0, 0.0, 0.0};
    Rng rng(3);
    for (int i = 0; i < 5; ++i)
        CHECK(lasso::predict(zero, {rng.normal(), rng.normal(), rng.normal()}) == 7.0);
}

TEST_CASE("non-finite input is rejected") {
    Rng rng(91);
    auto t = testutil::random_table(10, 3, rng);
    t.X.at(2, 1) = std::numeric_limits<double>::quiet_NaN();
    LassoConfig cfg;
    try {
        lasso::fit_lasso(t, cfg);
        FAIL("expected NonFiniteInput");
    } catch (const Error& e) {
        CHECK(e.name() == "NonFiniteInput");
    }
}

TEST_CASE("sparsity-targeted lambda selection") {
    Rng rng(101);
    {
        // target (d, d): a small lambda keeps everything active
        const auto t = testutil::random_table(40, 4, rng);
        const auto sel = lasso::select_lambda_for_sparsity(t, 4, 4);
        CHECK(sel.in_range);
        CHECK(sel.active_count == 4);
    }
    {
        // target (0, 0) -> lambda at or above lambda_max
        const auto t = testutil::random_table(40, 4, rng);
        const auto sel = lasso::select_lambda_for_sparsity(t, 0, 0);
        CHECK(sel.active_count == 0);
        CHECK(sel.lambda >= lasso::lambda_max(t.X, t.y, ObjectiveScaling::Mean) * 0.999);
    }
    {
        // planted 3-sparse problem: the selected support is the planted one
        auto t = testutil::random_table(60, 8, rng);
        const std::vector<double> beta_true = {0, 2.0, 0, 0, -1.5, 0, 2.5, 0};
        for (std::size_t r = 0; r < t.n(); ++r) {
            double v = 0.0;
            for (std::size_t c = 0; c < 8; ++c) v += t.X.at(r, c) * beta_true[c];
            t.y[r] = v + 0.01 * rng.normal();
        }
        const auto sel = lasso::select_lambda_for_sparsity(t, 3, 3);
        CHECK(sel.in_range);
        LassoConfig cfg;
        cfg.lambda = sel.lambda;
        const auto model = lasso::fit_lasso(t, cfg);
        CHECK(model.active_set == std::vector<std::string>{"x1", "x4", "x6"});
    }
}

TEST_CASE("lasso model JSON round trip") {
    Rng rng(111);
    const auto t = testutil::random_table(20, 4, rng);
    LassoConfig cfg;
    cfg.lambda = 0.05;
    const auto model = lasso::fit_lasso(t, cfg);
    const auto back = lasso::lasso_from_json(lasso::to_json(model));
    CHECK(back.intercept == model.intercept);
    CHECK(back.coefficients == model.coefficients);
    CHECK(back.lambda == model.lambda);
    CHECK(back.active_set == model.active_set);
}
