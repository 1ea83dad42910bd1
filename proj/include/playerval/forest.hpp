#pragma once

#include "playerval/features.hpp"
#include "playerval/trees.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace playerval::forest {

struct ForestConfig {
    int n_trees = 100;
    trees::TreeConfig tree;      // max_depth 6, min_samples_leaf 5
    int feature_subset_size = 0; // 0 = ceil(d / 3)
    bool bootstrap = true;       // n draws with replacement per tree
    std::uint64_t seed = 0;
    int n_threads = 0; // 0 = OpenMP default, 1 = serial reference

    int effective_subset(std::size_t d) const {
        return feature_subset_size > 0 ? feature_subset_size : static_cast<int>((d + 2) / 3);
    }
};

struct ForestModel {
    std::vector<trees::Tree> trees;
    Matrix per_tree_importance; // n_trees x d, each row sums to 1 (or is 0)
    std::vector<double> importance; // normalized over the whole forest
    ForestConfig config;
    std::vector<std::string> column_names;
    bool no_splits = false; // every tree is a single leaf
    std::vector<features::NormStat> norm_stats;
    std::vector<features::ColumnKind> column_kinds;
};

// Bagged ensemble with per-node random feature subsets. Each tree owns a
// child seed pre-split from cfg.seed, so serial and parallel fits are
// bit-identical.
ForestModel fit_forest(const features::FeatureTable& table, const ForestConfig& cfg);
ForestModel fit_forest(const Matrix& X, const std::vector<double>& y,
                       const std::vector<std::string>& column_names, const ForestConfig& cfg);

// Arithmetic mean of the tree predictions, summed left to right.
double predict(const ForestModel& model, const std::vector<double>& x_row);

// Impurity decrease w_n*V_n - sum_children w_c*V_c, with w the fraction of
// the tree's training samples reaching the node. LeafNode error on leaves.
double node_importance(const trees::Tree& tree, int node_id);

// Per-feature sums of node importances, normalized to total 1.
// NoSplits error on a single-leaf tree.
std::vector<double> tree_feature_importance(const trees::Tree& tree, std::size_t d);

// Sum of tree importances over all trees with splits, renormalized to 1.
std::vector<double> forest_feature_importance(const ForestModel& model);

std::string to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

void write_importance_csv(const std::string& path, const ForestModel& model,
                          const std::string& header_comment = "");

} // namespace playerval::forest
