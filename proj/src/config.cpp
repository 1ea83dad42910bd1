#include "playerval/config.hpp"

#include "playerval/error.hpp"

#include <cstdio>
#include <filesystem>

namespace playerval::cli {

lasso::LassoConfig RunConfig::lasso_config() const {
    lasso::LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.max_sweeps = max_sweeps;
    cfg.tol = tol;
    cfg.objective_scaling = objective_scaling;
    return cfg;
}

forest::ForestConfig RunConfig::forest_config() const {
    forest::ForestConfig cfg;
    cfg.n_trees = n_trees;
    cfg.tree.max_depth = max_depth;
    cfg.tree.min_samples_leaf = min_samples_leaf;
    cfg.feature_subset_size = feature_subset;
    cfg.bootstrap = bootstrap;
    cfg.seed = seed;
    cfg.n_threads = threads;
    return cfg;
}

std::string RunConfig::stamp() const {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "config_hash=0x%s seed=%llu", config_hash_hex.c_str(),
                  static_cast<unsigned long long>(seed));
    return buf;
}

RunConfig load_run_config(const std::string& path) {
    const auto kv = kv::read_kv_file(path);
    RunConfig cfg;
    cfg.matches_csv = kv.get_or("matches_csv", "");
    cfg.values_csv = kv.get_or("values_csv", "");
    cfg.profiles_csv = kv.get_or("profiles_csv", "");
    cfg.top20_clubs = kv.get_or("top20_clubs", "");
    cfg.position_aliases = kv.get_or("position_aliases", "");
    cfg.league_tiers = kv.get_or("league_tiers", "");
    cfg.out_dir = kv.get_or("out_dir", "out");
    if (kv.has("seed")) {
        cfg.seed = static_cast<std::uint64_t>(kv.integer_or("seed", 0));
        cfg.seed_set = true;
    }
    cfg.window.horizon_days = static_cast<int>(kv.integer_or("horizon_days", 730));
    cfg.window.window_length_days = static_cast<int>(kv.integer_or("window_days", 730));
    cfg.k_folds = static_cast<int>(kv.integer_or("k_folds", 5));
    cfg.threads = static_cast<int>(kv.integer_or("threads", 0));
    cfg.model = kv.get_or("model", "lasso");
    cfg.lambda = kv.number_or("lambda", 0.0);
    cfg.lambda_nnz_lo = static_cast<int>(kv.integer_or("lambda_nnz_lo", 10));
    cfg.lambda_nnz_hi = static_cast<int>(kv.integer_or("lambda_nnz_hi", 15));
    const auto scaling = kv.get_or("objective_scaling", "mean");
    if (scaling == "mean") cfg.objective_scaling = lasso::ObjectiveScaling::Mean;
    else if (scaling == "sum") cfg.objective_scaling = lasso::ObjectiveScaling::Sum;
    else raise("MalformedRow", path + ": objective_scaling must be 'mean' or 'sum'");
    cfg.max_sweeps = static_cast<int>(kv.integer_or("max_sweeps", 1000));
    cfg.tol = kv.number_or("tol", 1e-7);
    cfg.n_trees = static_cast<int>(kv.integer_or("n_trees", 100));
    cfg.max_depth = static_cast<int>(kv.integer_or("max_depth", 6));
    cfg.min_samples_leaf = static_cast<int>(kv.integer_or("min_samples_leaf", 5));
    cfg.feature_subset = static_cast<int>(kv.integer_or("feature_subset", 0));
    cfg.bootstrap = kv.flag_or("bootstrap", true);
    cfg.young.horizon_days = static_cast<int>(kv.integer_or("young_horizon_days", 365));
    cfg.young.window_days = static_cast<int>(kv.integer_or("young_window_days", 365));
    cfg.young.value_match_tolerance_days =
        static_cast<int>(kv.integer_or("value_match_tolerance_days", 90));
    cfg.include_league_feature = kv.flag_or("include_league_feature", true);
    cfg.reference_ranking = kv.get_or("reference_ranking", "");
    cfg.reference_top_k = static_cast<std::size_t>(kv.integer_or("reference_top_k", 0));
    cfg.position = kv.get_or("position", "");
    return cfg;
}

void finalize(RunConfig& cfg) {
    cfg.young.n_threads = cfg.threads;
    // The hash covers the effective settings, not the file text, so a flag
    // override changes it the same way an edit would.
    kv::KeyValues effective;
    auto put = [&](const std::string& k, const std::string& v) { effective.values[k] = v; };
    put("matches_csv", cfg.matches_csv);
    put("values_csv", cfg.values_csv);
    put("profiles_csv", cfg.profiles_csv);
    put("top20_clubs", cfg.top20_clubs);
    put("position_aliases", cfg.position_aliases);
    put("league_tiers", cfg.league_tiers);
    put("seed", std::to_string(cfg.seed));
    put("horizon_days", std::to_string(cfg.window.horizon_days));
    put("window_days", std::to_string(cfg.window.window_length_days));
    put("k_folds", std::to_string(cfg.k_folds));
    put("model", cfg.model);
    put("lambda", std::to_string(cfg.lambda));
    put("lambda_nnz_lo", std::to_string(cfg.lambda_nnz_lo));
    put("lambda_nnz_hi", std::to_string(cfg.lambda_nnz_hi));
    put("objective_scaling", cfg.objective_scaling == lasso::ObjectiveScaling::Sum ? "sum" : "mean");
    put("max_sweeps", std::to_string(cfg.max_sweeps));
    put("tol", std::to_string(cfg.tol));
    put("n_trees", std::to_string(cfg.n_trees));
    put("max_depth", std::to_string(cfg.max_depth));
    put("min_samples_leaf", std::to_string(cfg.min_samples_leaf));
    put("feature_subset", std::to_string(cfg.feature_subset));
    put("bootstrap", cfg.bootstrap ? "true" : "false");
    put("young_horizon_days", std::to_string(cfg.young.horizon_days));
    put("young_window_days", std::to_string(cfg.young.window_days));
    put("value_match_tolerance_days", std::to_string(cfg.young.value_match_tolerance_days));
    put("include_league_feature", cfg.include_league_feature ? "true" : "false");
    put("reference_ranking", cfg.reference_ranking);
    put("reference_top_k", std::to_string(cfg.reference_top_k));
    put("position", cfg.position);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(kv::fnv1a(effective.canonical())));
    cfg.config_hash_hex = buf;
}

void validate_inputs(const RunConfig& cfg, bool need_tiers) {
    if (!cfg.seed_set)
        raise("MissingConfigKey", "a seed is mandatory (config key 'seed' or flag --seed)");
    auto must_exist = [](const std::string& path, const std::string& what) {
        if (path.empty()) raise("MissingConfigKey", "config key '" + what + "' is required");
        if (!std::filesystem::exists(path))
            raise("FileNotFound", what + " path '" + path + "' does not exist");
    };
    must_exist(cfg.matches_csv, "matches_csv");
    must_exist(cfg.values_csv, "values_csv");
    must_exist(cfg.profiles_csv, "profiles_csv");
    must_exist(cfg.top20_clubs, "top20_clubs");
    if (!cfg.position_aliases.empty()) must_exist(cfg.position_aliases, "position_aliases");
    if (need_tiers) must_exist(cfg.league_tiers, "league_tiers");
    if (!cfg.reference_ranking.empty()) must_exist(cfg.reference_ranking, "reference_ranking");
    if (cfg.model != "lasso" && cfg.model != "forest")
        raise("MalformedRow", "model must be 'lasso' or 'forest', got '" + cfg.model + "'");
}

} // namespace playerval::cli
