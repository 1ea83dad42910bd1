#pragma once

#include "playerval/features.hpp"
#include "playerval/kvfile.hpp"
#include "playerval/lasso.hpp"
#include "playerval/forest.hpp"
#include "playerval/ranking.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace playerval::cli {

// Everything a batch run needs, read from one key-value config file; command
// line flags override individual keys before validation.
struct RunConfig {
    std::string matches_csv;
    std::string values_csv;
    std::string profiles_csv;
    std::string top20_clubs;
    std::string position_aliases; // empty = built-in alias table
    std::string league_tiers;     // required by `rank`
    std::string out_dir = "out";

    std::uint64_t seed = 0;
    bool seed_set = false; // mandatory; refuse to run without one

    features::WindowSpec window;
    int k_folds = 5;
    int threads = 0;

    std::string model = "lasso";
    double lambda = 0.0; // 0 = pick by sparsity target
    int lambda_nnz_lo = 10;
    int lambda_nnz_hi = 15;
    lasso::ObjectiveScaling objective_scaling = lasso::ObjectiveScaling::Mean;
    int max_sweeps = 1000;
    double tol = 1e-7;

    int n_trees = 100;
    int max_depth = 6;
    int min_samples_leaf = 5;
    int feature_subset = 0; // 0 = ceil(d/3)
    bool bootstrap = true;

    ranking::YoungTableOptions young;
    bool include_league_feature = true;
    std::string reference_ranking;    // optional, for `rank`
    std::size_t reference_top_k = 0;  // 0 = score all common players
    std::string position;             // optional, restricts train/importance

    std::string config_hash_hex; // FNV-1a of the effective key set

    lasso::LassoConfig lasso_config() const;
    forest::ForestConfig forest_config() const;
    // "config_hash=... seed=..." comment carried by every output file.
    std::string stamp() const;
};

RunConfig load_run_config(const std::string& path);

// Re-derives the hash after flag overrides; call once before running.
void finalize(RunConfig& cfg);

// Checks that every referenced input path exists and the seed is set.
void validate_inputs(const RunConfig& cfg, bool need_tiers = false);

} // namespace playerval::cli
