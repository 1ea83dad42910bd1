#pragma once

#include "playerval/features.hpp"
#include "playerval/matrix.hpp"

#include <string>
#include <vector>

namespace playerval::lasso {

// Penalized least squares, minimized by cyclic coordinate descent:
//   SUM:  sum_i (y_i - a - x_i.b)^2        + lambda * sum_j |b_j|
//   MEAN: (1/2n) sum_i (y_i - a - x_i.b)^2 + lambda * sum_j |b_j|
// MEAN is the default: the useful lambda range quoted for datasets of this
// size (~1e-3..1e-2 for 10-15 surviving features) only makes sense under it.
// The raw SUM form stays selectable.
enum class ObjectiveScaling { Sum, Mean };

struct LassoConfig {
    double lambda = 0.0;
    int max_sweeps = 1000;
    double tol = 1e-7; // max absolute coefficient change per sweep
    ObjectiveScaling objective_scaling = ObjectiveScaling::Mean;
    bool track_objective = false; // record the objective after every sweep
};

struct LassoModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    double lambda = 0.0;
    ObjectiveScaling objective_scaling = ObjectiveScaling::Mean;
    std::vector<std::string> column_names;
    std::vector<std::string> active_set; // names with nonzero coefficient
    bool converged = false;
    int sweeps_used = 0;
    double kkt_residual = 0.0;
    std::vector<double> objective_trace; // filled when track_objective is set
    std::vector<features::NormStat> norm_stats;
    std::vector<features::ColumnKind> column_kinds;
};

double soft_threshold(double z, double gamma);

// Objective value at (intercept, beta) for the given scaling.
double objective_value(const Matrix& X, const std::vector<double>& y, double intercept,
                       const std::vector<double>& beta, double lambda, ObjectiveScaling scaling);

// Smallest lambda whose solution is all-zero (X column-centered).
double lambda_max(const Matrix& X, const std::vector<double>& y, ObjectiveScaling scaling);

LassoModel fit_lasso(const features::FeatureTable& table, const LassoConfig& cfg);
LassoModel fit_lasso(const Matrix& X, const std::vector<double>& y,
                     const std::vector<std::string>& column_names, const LassoConfig& cfg);

double predict(const LassoModel& model, const std::vector<double>& x_row);

struct LambdaSelection {
    double lambda = 0.0;
    int active_count = 0;
    bool in_range = false; // false: returned the nearest achievable count
};

// Largest lambda whose active set lands in [lo, hi], by bisection on a log
// scale from lambda_max down.
LambdaSelection select_lambda_for_sparsity(const features::FeatureTable& table, int lo, int hi,
                                           const LassoConfig& base_cfg = {});

std::string to_json(const LassoModel& model);
LassoModel lasso_from_json(const std::string& text);

} // namespace playerval::lasso
