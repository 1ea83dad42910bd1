#include "playerval/lasso.hpp"

#include "playerval/error.hpp"
#include "playerval/stats_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace playerval::lasso {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_finite(const Matrix& X, const std::vector<double>& y) {
    for (const double v : X.data)
        if (!std::isfinite(v)) raise("NonFiniteInput", "design matrix contains a non-finite entry");
    for (const double v : y)
        if (!std::isfinite(v)) raise("NonFiniteInput", "target vector contains a non-finite entry");
}

// Max KKT violation of the subgradient conditions at (beta, residual).
// grad_j is the j-th partial derivative of the smooth part.
double kkt_residual(const std::vector<std::vector<double>>& cols, const std::vector<double>& residual,
                    const std::vector<double>& beta, double lambda, ObjectiveScaling scaling) {
    const double n = static_cast<double>(residual.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < residual.size(); ++i) dot += cols[j][i] * residual[i];
        const double grad = scaling == ObjectiveScaling::Sum ? -2.0 * dot : -dot / n;
        double violation;
        if (beta[j] != 0.0)
            violation = std::abs(grad + lambda * (beta[j] > 0.0 ? 1.0 : -1.0));
        else
            violation = std::max(0.0, std::abs(grad) - lambda);
        worst = std::max(worst, violation);
    }
    return worst;
}

} // namespace

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

double objective_value(const Matrix& X, const std::vector<double>& y, double intercept,
                       const std::vector<double>& beta, double lambda, ObjectiveScaling scaling) {
    double rss = 0.0;
    for (std::size_t i = 0; i < X.rows; ++i) {
        double pred = intercept;
        const double* row = X.row(i);
        for (std::size_t j = 0; j < X.cols; ++j) pred += row[j] * beta[j];
        const double r = y[i] - pred;
        rss += r * r;
    }
    double l1 = 0.0;
    for (const double b : beta) l1 += std::abs(b);
    const double fit = scaling == ObjectiveScaling::Sum ? rss : rss / (2.0 * static_cast<double>(X.rows));
    return fit + lambda * l1;
}

double lambda_max(const Matrix& X, const std::vector<double>& y, ObjectiveScaling scaling) {
    const double ybar = mean_of(y);
    double max_corr = 0.0;
    for (std::size_t j = 0; j < X.cols; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) dot += X.at(i, j) * (y[i] - ybar);
        max_corr = std::max(max_corr, std::abs(dot));
    }
    return scaling == ObjectiveScaling::Sum ? 2.0 * max_corr : max_corr / static_cast<double>(X.rows);
}

LassoModel fit_lasso(const Matrix& X, const std::vector<double>& y,
                     const std::vector<std::string>& column_names, const LassoConfig& cfg) {
    if (cfg.lambda < 0.0) raise("NonFiniteInput", "lambda must be >= 0");
    if (X.rows < 2) raise("TooFewSamples", "lasso needs n >= 2");
    if (X.rows != y.size()) raise("DimensionMismatch", "X and y row counts differ");
    check_finite(X, y);

    const std::size_t n = X.rows, d = X.cols;
    const double dn = static_cast<double>(n);
    const auto cols = X.columns();

    LassoModel model;
    model.lambda = cfg.lambda;
    model.objective_scaling = cfg.objective_scaling;
    model.column_names = column_names;
    model.intercept = mean_of(y); // unpenalized intercept over centered X
    model.coefficients.assign(d, 0.0);

    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - model.intercept;

    std::vector<double> col_sq(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < n; ++i) col_sq[j] += cols[j][i] * cols[j][i];

    // Coordinate update: minimize the objective in beta_j holding the rest.
    // rho = x_j . (residual + x_j beta_j); the scaling only moves lambda.
    // The mean form thresholds rho/n against lambda with the same arithmetic
    // lambda_max uses, so beta stays exactly zero at the boundary.
    const bool sum_form = cfg.objective_scaling == ObjectiveScaling::Sum;
    const double thresh = sum_form ? cfg.lambda / 2.0 : cfg.lambda;
    const double kkt_tol = 10.0 * cfg.tol;

    auto& beta = model.coefficients;
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (col_sq[j] == 0.0) continue; // all-zero column stays at 0
            double dot = 0.0;
            const auto& xj = cols[j];
            for (std::size_t i = 0; i < n; ++i) dot += xj[i] * residual[i];
            const double rho = dot + col_sq[j] * beta[j];
            const double updated = sum_form ? soft_threshold(rho, thresh) / col_sq[j]
                                            : soft_threshold(rho / dn, thresh) * dn / col_sq[j];
            const double delta = updated - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) residual[i] -= xj[i] * delta;
                beta[j] = updated;
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        model.sweeps_used = sweep + 1;
        if (cfg.track_objective)
            model.objective_trace.push_back(
                objective_value(X, y, model.intercept, beta, cfg.lambda, cfg.objective_scaling));
        if (max_change < cfg.tol) {
            // Convergence means the subgradient conditions hold, not merely
            // that the sweep stalled; keep polishing otherwise.
            model.kkt_residual = kkt_residual(cols, residual, beta, cfg.lambda, cfg.objective_scaling);
            if (model.kkt_residual <= kkt_tol) {
                model.converged = true;
                break;
            }
            if (max_change == 0.0) break; // exact fixed point, cannot improve
        }
    }
    if (!model.converged)
        model.kkt_residual = kkt_residual(cols, residual, beta, cfg.lambda, cfg.objective_scaling);

    for (std::size_t j = 0; j < d; ++j)
        if (beta[j] != 0.0)
            model.active_set.push_back(j < column_names.size() ? column_names[j] : "x" + std::to_string(j));
    return model;
}

LassoModel fit_lasso(const features::FeatureTable& table, const LassoConfig& cfg) {
    auto model = fit_lasso(table.X, table.y, table.columns, cfg);
    model.norm_stats = table.norm_stats;
    model.column_kinds = table.kinds;
    return model;
}

double predict(const LassoModel& model, const std::vector<double>& x_row) {
    if (x_row.size() != model.coefficients.size())
        raise("DimensionMismatch", "expected " + std::to_string(model.coefficients.size()) +
                                       " features, got " + std::to_string(x_row.size()));
    double out = model.intercept;
    for (std::size_t j = 0; j < x_row.size(); ++j) out += model.coefficients[j] * x_row[j];
    return out;
}

LambdaSelection select_lambda_for_sparsity(const features::FeatureTable& table, int lo, int hi,
                                           const LassoConfig& base_cfg) {
    if (lo > hi) raise("DimensionMismatch", "sparsity target range is inverted");
    const double lam_max = lambda_max(table.X, table.y, base_cfg.objective_scaling);

    auto count_at = [&](double lambda) {
        LassoConfig cfg = base_cfg;
        cfg.lambda = lambda;
        cfg.track_objective = false;
        return static_cast<int>(fit_lasso(table, cfg).active_set.size());
    };

    LambdaSelection best;
    if (lam_max == 0.0) { // constant target: everything is always zero
        best.lambda = 0.0;
        best.active_count = 0;
        best.in_range = lo <= 0;
        return best;
    }
    if (hi <= 0) return {lam_max, 0, true};

    int best_distance = -1;
    double low = lam_max * 1e-7, high = lam_max;
    for (int iter = 0; iter < 48; ++iter) {
        const double mid = std::sqrt(low * high);
        const int k = count_at(mid);
        if (k >= lo && k <= hi) {
            if (!best.in_range || mid > best.lambda) best = {mid, k, true};
            low = mid; // a larger lambda in range may still exist
        } else {
            const int distance = k < lo ? lo - k : k - hi;
            if (!best.in_range && (best_distance < 0 || distance < best_distance)) {
                best = {mid, k, false};
                best_distance = distance;
            }
            if (k < lo) high = mid; // too sparse, relax the penalty
            else low = mid;         // too dense, tighten it
        }
    }
    return best;
}

std::string to_json(const LassoModel& model) {
    ordered_json j;
    j["model"] = "lasso";
    j["lambda"] = model.lambda;
    j["objective_scaling"] = model.objective_scaling == ObjectiveScaling::Sum ? "sum" : "mean";
    j["intercept"] = model.intercept;
    j["converged"] = model.converged;
    j["sweeps_used"] = model.sweeps_used;
    j["kkt_residual"] = model.kkt_residual;
    ordered_json coeffs = ordered_json::array();
    for (std::size_t i = 0; i < model.coefficients.size(); ++i) {
        ordered_json c;
        c["name"] = i < model.column_names.size() ? model.column_names[i] : "x" + std::to_string(i);
        c["value"] = model.coefficients[i];
        coeffs.push_back(std::move(c));
    }
    j["coefficients"] = std::move(coeffs);
    j["active_set"] = model.active_set;
    if (!model.norm_stats.empty()) {
        ordered_json stats = ordered_json::array();
        for (std::size_t i = 0; i < model.norm_stats.size(); ++i) {
            ordered_json s;
            s["mean"] = model.norm_stats[i].mean;
            s["scale"] = model.norm_stats[i].scale;
            s["degenerate"] = model.norm_stats[i].degenerate;
            s["kind"] = static_cast<int>(model.column_kinds[i]);
            stats.push_back(std::move(s));
        }
        j["norm_stats"] = std::move(stats);
    }
    return j.dump(2);
}

LassoModel lasso_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    LassoModel model;
    model.lambda = j.at("lambda").get<double>();
    model.objective_scaling =
        j.at("objective_scaling").get<std::string>() == "sum" ? ObjectiveScaling::Sum : ObjectiveScaling::Mean;
    model.intercept = j.at("intercept").get<double>();
    model.converged = j.at("converged").get<bool>();
    model.sweeps_used = j.at("sweeps_used").get<int>();
    model.kkt_residual = j.at("kkt_residual").get<double>();
    for (const auto& c : j.at("coefficients")) {
        model.column_names.push_back(c.at("name").get<std::string>());
        model.coefficients.push_back(c.at("value").get<double>());
    }
    model.active_set = j.at("active_set").get<std::vector<std::string>>();
    if (j.contains("norm_stats")) {
        for (const auto& s : j.at("norm_stats")) {
            features::NormStat ns;
            ns.mean = s.at("mean").get<double>();
            ns.scale = s.at("scale").get<double>();
            ns.degenerate = s.at("degenerate").get<bool>();
            model.norm_stats.push_back(ns);
            model.column_kinds.push_back(static_cast<features::ColumnKind>(s.at("kind").get<int>()));
        }
    }
    return model;
}

} // namespace playerval::lasso
