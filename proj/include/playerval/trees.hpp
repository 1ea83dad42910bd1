#pragma once

#include "playerval/matrix.hpp"
#include "playerval/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace playerval::trees {

struct TreeConfig {
    int max_depth = 6;
    int min_samples_leaf = 5;
    int min_samples_split = 0; // 0 = 2 * min_samples_leaf
    int feature_subset_size = 0; // 0 = consider all features at every node

    int effective_min_split() const {
        return min_samples_split > 0 ? min_samples_split : 2 * min_samples_leaf;
    }
};

// Flat node storage; root at index 0. feature == -1 marks a leaf. Samples
// with x[feature] < threshold go left ("true" branch).
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double prediction = 0.0; // mean of training targets reaching the node
    int n_samples = 0;
    double impurity = 0.0; // population variance of those targets
};

struct Tree {
    std::vector<TreeNode> nodes;
    std::size_t n_features = 0;

    bool is_leaf(int i) const { return nodes[static_cast<std::size_t>(i)].feature < 0; }
    bool is_stump() const { return nodes.size() == 1; }
};

struct Split {
    int feature = 0;
    double threshold = 0.0;
    double weighted_child_impurity = 0.0;
};

// Population variance of the targets (EmptyTargets when the vector is empty).
double impurity(const std::vector<double>& targets);

// Exhaustive scan over candidate features; thresholds are midpoints of
// consecutive distinct sorted values; splits leaving a child below
// min_samples_leaf are skipped. Empty when no legal split strictly decreases
// the weighted impurity. Ties: lowest feature index, then lowest threshold.
std::optional<Split> best_split(const std::vector<std::vector<double>>& columns,
                                const std::vector<double>& y, const std::vector<int>& indices,
                                const std::vector<int>& candidate_features, int min_samples_leaf);

// CART on the rows selected by `indices` (duplicates allowed: bootstrap).
// When cfg.feature_subset_size > 0 each node draws that many distinct
// candidate features from rng.
Tree fit_tree(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
              const std::vector<int>& indices, const TreeConfig& cfg, Rng& rng);

Tree fit_tree(const Matrix& X, const std::vector<double>& y, const TreeConfig& cfg, Rng& rng);

double predict(const Tree& tree, const std::vector<double>& x_row);
double predict(const Tree& tree, const double* x_row, std::size_t width);

std::string to_json(const Tree& tree);
Tree tree_from_json(const std::string& text);

} // namespace playerval::trees
