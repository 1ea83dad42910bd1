#include "playerval/trees.hpp"

#include "playerval/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace playerval::trees {

namespace {

using ordered_json = nlohmann::ordered_json;

struct NodeStats {
    double mean = 0.0;
    double variance = 0.0;
};

NodeStats stats_of(const std::vector<double>& y, const std::vector<int>& indices) {
    double sum = 0.0;
    for (const int i : indices) sum += y[static_cast<std::size_t>(i)];
    const double mean = sum / static_cast<double>(indices.size());
    double acc = 0.0;
    for (const int i : indices) {
        const double d = y[static_cast<std::size_t>(i)] - mean;
        acc += d * d;
    }
    return {mean, acc / static_cast<double>(indices.size())};
}

struct Builder {
    const std::vector<std::vector<double>>& columns;
    const std::vector<double>& y;
    const TreeConfig& cfg;
    Rng& rng;
    Tree& tree;

    int build(std::vector<int>& indices, int depth) {
        const auto node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const auto st = stats_of(y, indices);
        {
            auto& node = tree.nodes.back();
            node.n_samples = static_cast<int>(indices.size());
            node.prediction = st.mean;
            node.impurity = st.variance;
        }

        const bool can_split = depth < cfg.max_depth &&
                               static_cast<int>(indices.size()) >= cfg.effective_min_split() &&
                               st.variance > 0.0;
        if (!can_split) return node_id;

        std::vector<int> candidates;
        if (cfg.feature_subset_size > 0 &&
            cfg.feature_subset_size < static_cast<int>(columns.size())) {
            candidates = rng.sample_indices(static_cast<int>(columns.size()), cfg.feature_subset_size);
        } else {
            candidates.resize(columns.size());
            for (std::size_t f = 0; f < columns.size(); ++f) candidates[f] = static_cast<int>(f);
        }

        const auto split = best_split(columns, y, indices, candidates, cfg.min_samples_leaf);
        if (!split) return node_id;

        // Stable partition keeps the canonical index order in both children,
        // which pins every downstream floating sum bit-for-bit.
        std::vector<int> left_idx, right_idx;
        left_idx.reserve(indices.size());
        for (const int i : indices) {
            if (columns[static_cast<std::size_t>(split->feature)][static_cast<std::size_t>(i)] < split->threshold)
                left_idx.push_back(i);
            else
                right_idx.push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = split->feature;
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return node_id;
    }
};

ordered_json node_to_json(const Tree& tree, int id) {
    const auto& n = tree.nodes[static_cast<std::size_t>(id)];
    ordered_json j;
    if (n.feature < 0) {
        j["prediction"] = n.prediction;
        j["n_samples"] = n.n_samples;
        j["impurity"] = n.impurity;
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["n_samples"] = n.n_samples;
        j["impurity"] = n.impurity;
        j["left"] = node_to_json(tree, n.left);
        j["right"] = node_to_json(tree, n.right);
    }
    return j;
}

int node_from_json(const ordered_json& j, Tree& tree) {
    const auto id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("feature")) {
        const int feature = j.at("feature").get<int>();
        const double threshold = j.at("threshold").get<double>();
        const int n_samples = j.at("n_samples").get<int>();
        const double imp = j.at("impurity").get<double>();
        const int left = node_from_json(j.at("left"), tree);
        const int right = node_from_json(j.at("right"), tree);
        auto& n = tree.nodes[static_cast<std::size_t>(id)];
        n.feature = feature;
        n.threshold = threshold;
        n.n_samples = n_samples;
        n.impurity = imp;
        n.left = left;
        n.right = right;
        // inner prediction = weighted child means, for completeness
        const auto& l = tree.nodes[static_cast<std::size_t>(left)];
        const auto& r = tree.nodes[static_cast<std::size_t>(right)];
        n.prediction = (l.prediction * l.n_samples + r.prediction * r.n_samples) / n.n_samples;
    } else {
        auto& n = tree.nodes[static_cast<std::size_t>(id)];
        n.prediction = j.at("prediction").get<double>();
        n.n_samples = j.at("n_samples").get<int>();
        n.impurity = j.at("impurity").get<double>();
    }
    return id;
}

} // namespace

double impurity(const std::vector<double>& targets) {
    if (targets.empty()) raise("EmptyTargets", "impurity of an empty target vector");
    std::vector<int> idx(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) idx[i] = static_cast<int>(i);
    return stats_of(targets, idx).variance;
}

std::optional<Split> best_split(const std::vector<std::vector<double>>& columns,
                                const std::vector<double>& y, const std::vector<int>& indices,
                                const std::vector<int>& candidate_features, int min_samples_leaf) {
    const auto m = indices.size();
    if (m < 2) return std::nullopt;

    const auto node = stats_of(y, indices);
    std::optional<Split> best;

    // Sort key (value, position-in-node) makes tie groups byte-stable, so
    // prefix sums never depend on std::sort internals.
    std::vector<std::pair<double, std::size_t>> order(m);
    std::vector<double> prefix_sum(m + 1, 0.0), prefix_sumsq(m + 1, 0.0);

    for (const int f : candidate_features) {
        const auto& col = columns[static_cast<std::size_t>(f)];
        for (std::size_t k = 0; k < m; ++k)
            order[k] = {col[static_cast<std::size_t>(indices[k])], k};
        std::sort(order.begin(), order.end());

        for (std::size_t k = 0; k < m; ++k) {
            const double t = y[static_cast<std::size_t>(indices[order[k].second])];
            prefix_sum[k + 1] = prefix_sum[k] + t;
            prefix_sumsq[k + 1] = prefix_sumsq[k] + t * t;
        }

        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (order[k].first == order[k + 1].first) continue; // no boundary here
            const auto n_left = static_cast<double>(k + 1);
            const auto n_right = static_cast<double>(m - k - 1);
            if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;

            const double sum_l = prefix_sum[k + 1];
            const double sum_r = prefix_sum[m] - sum_l;
            const double sq_l = prefix_sumsq[k + 1];
            const double sq_r = prefix_sumsq[m] - sq_l;
            const double var_l = std::max(0.0, sq_l / n_left - (sum_l / n_left) * (sum_l / n_left));
            const double var_r = std::max(0.0, sq_r / n_right - (sum_r / n_right) * (sum_r / n_right));
            const double weighted = (n_left * var_l + n_right * var_r) / static_cast<double>(m);

            if (weighted >= node.variance) continue; // must strictly decrease
            if (!best || weighted < best->weighted_child_impurity) {
                const double threshold = (order[k].first + order[k + 1].first) / 2.0;
                best = Split{f, threshold, weighted};
            }
        }
    }
    return best;
}

Tree fit_tree(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
              const std::vector<int>& indices, const TreeConfig& cfg, Rng& rng) {
    if (indices.empty()) raise("EmptyTargets", "cannot fit a tree on zero samples");
    if (cfg.max_depth < 0 || cfg.min_samples_leaf < 1)
        raise("DimensionMismatch", "max_depth must be >= 0 and min_samples_leaf >= 1");
    Tree tree;
    tree.n_features = columns.size();
    std::vector<int> idx = indices;
    Builder builder{columns, y, cfg, rng, tree};
    builder.build(idx, 0);
    return tree;
}

Tree fit_tree(const Matrix& X, const std::vector<double>& y, const TreeConfig& cfg, Rng& rng) {
    std::vector<int> idx(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) idx[i] = static_cast<int>(i);
    return fit_tree(X.columns(), y, idx, cfg, rng);
}

double predict(const Tree& tree, const double* x_row, std::size_t width) {
    int id = 0;
    while (true) {
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) return node.prediction;
        if (static_cast<std::size_t>(node.feature) >= width)
            raise("DimensionMismatch", "tree splits on feature " + std::to_string(node.feature) +
                                           " but the row has " + std::to_string(width) + " features");
        id = x_row[node.feature] < node.threshold ? node.left : node.right;
    }
}

double predict(const Tree& tree, const std::vector<double>& x_row) {
    if (tree.n_features != 0 && x_row.size() != tree.n_features)
        raise("DimensionMismatch", "expected " + std::to_string(tree.n_features) + " features, got " +
                                       std::to_string(x_row.size()));
    return predict(tree, x_row.data(), x_row.size());
}

std::string to_json(const Tree& tree) {
    ordered_json j;
    j["n_features"] = tree.n_features;
    j["root"] = node_to_json(tree, 0);
    return j.dump(2);
}

Tree tree_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    Tree tree;
    tree.n_features = j.at("n_features").get<std::size_t>();
    node_from_json(j.at("root"), tree);
    return tree;
}

} // namespace playerval::trees
