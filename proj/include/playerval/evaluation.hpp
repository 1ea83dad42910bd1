#pragma once

#include "playerval/features.hpp"
#include "playerval/forest.hpp"
#include "playerval/lasso.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace playerval::eval {

struct ModelSpec {
    enum class Kind { Lasso, Forest };
    Kind kind = Kind::Lasso;
    lasso::LassoConfig lasso;
    forest::ForestConfig forest;

    std::string kind_name() const { return kind == Kind::Lasso ? "lasso" : "forest"; }
};

struct CVReport {
    std::string position_code;
    std::string model_kind;
    double lambda = 0.0; // lasso only
    double mse_cv = 0.0;
    double r2_cv = 0.0; // 1 - mse_cv / VAR(y), population variance
    std::vector<double> fold_mses;
    std::vector<std::size_t> fold_sizes;
    std::size_t n_samples = 0;
    std::vector<std::string> selected_features;
};

// Seeded shuffle dealt into k folds with sizes differing by at most one;
// disjoint and covering [0, n).
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed);

struct FoldResult {
    double mse = 0.0;
    std::size_t n_test = 0;
    // Normalization statistics fitted on the training complement only; the
    // held-out rows are transformed with these, never with their own.
    std::vector<features::NormStat> norm_stats;
};

// Fits on the train rows of the *raw* table (normalizing them locally) and
// scores MSE on the held-out rows.
FoldResult evaluate_fold(const features::FeatureTable& raw, const std::vector<std::size_t>& train_idx,
                         const std::vector<std::size_t>& test_idx, const ModelSpec& spec);

CVReport cross_validate(const features::FeatureTable& raw, const ModelSpec& spec, int k, std::uint64_t seed);

struct GridSearchResult {
    std::size_t best_index = 0;
    std::vector<CVReport> reports; // one per grid point, in grid order
    const CVReport& best() const { return reports[best_index]; }
};

// cross_validate per grid point; best by max r2_cv, first grid point wins
// exact ties.
GridSearchResult grid_search(const features::FeatureTable& raw, const std::vector<ModelSpec>& grid, int k,
                             std::uint64_t seed);

features::FeatureTable subset_rows(const features::FeatureTable& table,
                                   const std::vector<std::size_t>& rows);

void write_cv_reports_csv(const std::string& path, const std::vector<CVReport>& reports,
                          const std::string& header_comment = "");
std::string cv_report_to_json(const CVReport& report);

} // namespace playerval::eval
