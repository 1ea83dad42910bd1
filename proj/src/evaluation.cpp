#include "playerval/evaluation.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"
#include "playerval/rng.hpp"
#include "playerval/stats_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace playerval::eval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> top_importance_features(const forest::ForestModel& model, std::size_t count) {
    std::vector<std::size_t> order(model.importance.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.importance[a] > model.importance[b]; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < order.size() && i < count; ++i) {
        if (model.importance[order[i]] <= 0.0) break;
        out.push_back(model.column_names[order[i]]);
    }
    return out;
}

} // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) raise("TooFewSamples", "k-fold needs k >= 2");
    if (n < static_cast<std::size_t>(k))
        raise("TooFewSamples", "cannot split " + std::to_string(n) + " samples into " + std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                        order.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
    }
    return folds;
}

features::FeatureTable subset_rows(const features::FeatureTable& table, const std::vector<std::size_t>& rows) {
    features::FeatureTable out;
    out.position_code = table.position_code;
    out.columns = table.columns;
    out.kinds = table.kinds;
    out.norm_stats = table.norm_stats;
    out.X = Matrix(rows.size(), table.d());
    out.y.reserve(rows.size());
    out.player_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::copy(table.X.row(rows[r]), table.X.row(rows[r]) + table.d(), out.X.row(r));
        out.y.push_back(table.y[rows[r]]);
        out.player_ids.push_back(table.player_ids[rows[r]]);
    }
    return out;
}

FoldResult evaluate_fold(const features::FeatureTable& raw, const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& test_idx, const ModelSpec& spec) {
    const auto train_raw = subset_rows(raw, train_idx);
    const auto train = features::normalize(train_raw);

    FoldResult result;
    result.norm_stats = train.norm_stats;
    result.n_test = test_idx.size();

    std::vector<double> raw_row(raw.d());
    double sq_err = 0.0;
    if (spec.kind == ModelSpec::Kind::Lasso) {
        const auto model = lasso::fit_lasso(train, spec.lasso);
        for (const auto r : test_idx) {
            raw_row.assign(raw.X.row(r), raw.X.row(r) + raw.d());
            const auto x = features::apply_norm_stats(raw_row, train.norm_stats, train.kinds);
            const double err = raw.y[r] - lasso::predict(model, x);
            sq_err += err * err;
        }
    } else {
        const auto model = forest::fit_forest(train, spec.forest);
        for (const auto r : test_idx) {
            raw_row.assign(raw.X.row(r), raw.X.row(r) + raw.d());
            const auto x = features::apply_norm_stats(raw_row, train.norm_stats, train.kinds);
            const double err = raw.y[r] - forest::predict(model, x);
            sq_err += err * err;
        }
    }
    result.mse = test_idx.empty() ? 0.0 : sq_err / static_cast<double>(test_idx.size());
    return result;
}

CVReport cross_validate(const features::FeatureTable& raw, const ModelSpec& spec, int k, std::uint64_t seed) {
    if (raw.normalized())
        raise("AlreadyNormalized", "cross_validate expects the raw table; folds are normalized locally");
    const auto folds = kfold_split(raw.n(), k, seed);

    CVReport report;
    report.position_code = raw.position_code;
    report.model_kind = spec.kind_name();
    report.lambda = spec.kind == ModelSpec::Kind::Lasso ? spec.lasso.lambda : 0.0;
    report.n_samples = raw.n();

    double weighted = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train_idx;
        train_idx.reserve(raw.n() - folds[f].size());
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        const auto fold = evaluate_fold(raw, train_idx, folds[f], spec);
        report.fold_mses.push_back(fold.mse);
        report.fold_sizes.push_back(fold.n_test);
        weighted += fold.mse * static_cast<double>(fold.n_test);
    }
    report.mse_cv = weighted / static_cast<double>(raw.n());

    const double var_y = population_variance(raw.y);
    report.r2_cv = var_y > 0.0 ? 1.0 - report.mse_cv / var_y : 0.0;

    // Features reported from a fit on the full table.
    const auto full = features::normalize(raw);
    if (spec.kind == ModelSpec::Kind::Lasso) {
        report.selected_features = lasso::fit_lasso(full, spec.lasso).active_set;
    } else {
        const auto model = forest::fit_forest(full, spec.forest);
        if (!model.no_splits) report.selected_features = top_importance_features(model, 15);
    }
    return report;
}

GridSearchResult grid_search(const features::FeatureTable& raw, const std::vector<ModelSpec>& grid, int k,
                             std::uint64_t seed) {
    if (grid.empty()) raise("TooFewSamples", "grid search needs at least one configuration");
    GridSearchResult result;
    result.reports.reserve(grid.size());
    for (const auto& spec : grid) result.reports.push_back(cross_validate(raw, spec, k, seed));
    for (std::size_t i = 1; i < result.reports.size(); ++i)
        if (result.reports[i].r2_cv > result.reports[result.best_index].r2_cv) result.best_index = i;
    return result;
}

void write_cv_reports_csv(const std::string& path, const std::vector<CVReport>& reports,
                          const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    w.row({"position", "model", "lambda", "mse", "r2", "n_samples", "selected_features"});
    for (const auto& r : reports) {
        std::string features;
        for (const auto& f : r.selected_features) {
            if (!features.empty()) features.push_back(';');
            features += f;
        }
        w.row({r.position_code, r.model_kind, csv::format_double(r.lambda), csv::format_double(r.mse_cv),
               csv::format_double(r.r2_cv), std::to_string(r.n_samples), features});
    }
}

std::string cv_report_to_json(const CVReport& report) {
    ordered_json j;
    j["position"] = report.position_code;
    j["model"] = report.model_kind;
    j["lambda"] = report.lambda;
    j["mse_cv"] = report.mse_cv;
    j["r2_cv"] = report.r2_cv;
    j["fold_mses"] = report.fold_mses;
    j["fold_sizes"] = report.fold_sizes;
    j["n_samples"] = report.n_samples;
    j["selected_features"] = report.selected_features;
    return j.dump(2);
}

} // namespace playerval::eval
