#include "playerval/forest.hpp"

#include "playerval/error.hpp"
#include "playerval/csv.hpp"
#include "playerval/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace playerval::forest {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_finite(const Matrix& X, const std::vector<double>& y) {
    for (const double v : X.data)
        if (!std::isfinite(v)) raise("NonFiniteInput", "design matrix contains a non-finite entry");
    for (const double v : y)
        if (!std::isfinite(v)) raise("NonFiniteInput", "target vector contains a non-finite entry");
}

} // namespace

ForestModel fit_forest(const Matrix& X, const std::vector<double>& y,
                       const std::vector<std::string>& column_names, const ForestConfig& cfg) {
    if (cfg.n_trees < 1) raise("DimensionMismatch", "n_trees must be >= 1");
    if (X.rows < 2) raise("TooFewSamples", "forest needs n >= 2");
    if (X.rows != y.size()) raise("DimensionMismatch", "X and y row counts differ");
    check_finite(X, y);

    const std::size_t n = X.rows, d = X.cols;
    ForestModel model;
    model.config = cfg;
    model.column_names = column_names;
    model.trees.resize(static_cast<std::size_t>(cfg.n_trees));

    trees::TreeConfig tree_cfg = cfg.tree;
    tree_cfg.feature_subset_size = std::min<int>(cfg.effective_subset(d), static_cast<int>(d));

    const auto columns = X.columns();

    // One child seed per tree, drawn before dispatch; the tree index fully
    // determines its randomness regardless of scheduling.
    std::vector<std::uint64_t> seeds(model.trees.size());
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = split_seed(cfg.seed, k);

    std::vector<std::exception_ptr> errors(model.trees.size());
    parallel_for(model.trees.size(), cfg.n_threads, [&](std::size_t k) {
        try {
            Rng rng(seeds[k]);
            std::vector<int> idx(n);
            if (cfg.bootstrap) {
                for (std::size_t i = 0; i < n; ++i)
                    idx[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            } else {
                for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
            }
            model.trees[k] = trees::fit_tree(columns, y, idx, tree_cfg, rng);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    model.per_tree_importance = Matrix(model.trees.size(), d);
    bool any_split = false;
    for (std::size_t k = 0; k < model.trees.size(); ++k) {
        if (model.trees[k].is_stump()) continue;
        any_split = true;
        const auto imp = tree_feature_importance(model.trees[k], d);
        std::copy(imp.begin(), imp.end(), model.per_tree_importance.row(k));
    }

    model.importance.assign(d, 0.0);
    if (any_split) {
        for (std::size_t k = 0; k < model.trees.size(); ++k)
            for (std::size_t j = 0; j < d; ++j) model.importance[j] += model.per_tree_importance.at(k, j);
        double total = 0.0;
        for (const double v : model.importance) total += v;
        for (double& v : model.importance) v /= total;
    } else {
        model.no_splits = true;
    }
    return model;
}

ForestModel fit_forest(const features::FeatureTable& table, const ForestConfig& cfg) {
    auto model = fit_forest(table.X, table.y, table.columns, cfg);
    model.norm_stats = table.norm_stats;
    model.column_kinds = table.kinds;
    return model;
}

double predict(const ForestModel& model, const std::vector<double>& x_row) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += trees::predict(tree, x_row.data(), x_row.size());
    return sum / static_cast<double>(model.trees.size());
}

double node_importance(const trees::Tree& tree, int node_id) {
    const auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
    if (node.feature < 0) raise("LeafNode", "node importance is defined for inner nodes only");
    const double root_n = static_cast<double>(tree.nodes[0].n_samples);
    const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
    const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
    const double w = node.n_samples / root_n;
    const double wl = l.n_samples / root_n;
    const double wr = r.n_samples / root_n;
    return w * node.impurity - (wl * l.impurity + wr * r.impurity);
}

std::vector<double> tree_feature_importance(const trees::Tree& tree, std::size_t d) {
    if (tree.is_stump()) raise("NoSplits", "single-leaf tree has no feature importance");
    std::vector<double> per_feature(d, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& node = tree.nodes[i];
        if (node.feature < 0) continue;
        const double imp = node_importance(tree, static_cast<int>(i));
        per_feature[static_cast<std::size_t>(node.feature)] += imp;
        total += imp;
    }
    if (total > 0.0)
        for (double& v : per_feature) v /= total;
    return per_feature;
}

std::vector<double> forest_feature_importance(const ForestModel& model) {
    const std::size_t d = model.per_tree_importance.cols;
    std::vector<double> out(d, 0.0);
    bool any = false;
    for (std::size_t k = 0; k < model.trees.size(); ++k) {
        if (model.trees[k].is_stump()) continue;
        any = true;
        for (std::size_t j = 0; j < d; ++j) out[j] += model.per_tree_importance.at(k, j);
    }
    if (!any) raise("NoSplits", "no tree in the forest made a split");
    double total = 0.0;
    for (const double v : out) total += v;
    for (double& v : out) v /= total;
    return out;
}

std::string to_json(const ForestModel& model) {
    ordered_json j;
    j["model"] = "forest";
    ordered_json cfg;
    cfg["n_trees"] = model.config.n_trees;
    cfg["max_depth"] = model.config.tree.max_depth;
    cfg["min_samples_leaf"] = model.config.tree.min_samples_leaf;
    cfg["feature_subset_size"] = model.config.feature_subset_size;
    cfg["bootstrap"] = model.config.bootstrap;
    j["config"] = std::move(cfg);
    j["seed"] = model.config.seed;
    j["no_splits"] = model.no_splits;
    ordered_json trees_json = ordered_json::array();
    for (const auto& tree : model.trees) trees_json.push_back(ordered_json::parse(trees::to_json(tree)));
    j["trees"] = std::move(trees_json);
    ordered_json imp = ordered_json::array();
    for (std::size_t i = 0; i < model.importance.size(); ++i) {
        ordered_json e;
        e["name"] = i < model.column_names.size() ? model.column_names[i] : "x" + std::to_string(i);
        e["value"] = model.importance[i];
        imp.push_back(std::move(e));
    }
    j["importance"] = std::move(imp);
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

ForestModel forest_from_json(const std::string& text) {
    const auto j = ordered_json::parse(text);
    ForestModel model;
    model.config.n_trees = j.at("config").at("n_trees").get<int>();
    model.config.tree.max_depth = j.at("config").at("max_depth").get<int>();
    model.config.tree.min_samples_leaf = j.at("config").at("min_samples_leaf").get<int>();
    model.config.feature_subset_size = j.at("config").at("feature_subset_size").get<int>();
    model.config.bootstrap = j.at("config").at("bootstrap").get<bool>();
    model.config.seed = j.at("seed").get<std::uint64_t>();
    model.no_splits = j.at("no_splits").get<bool>();
    for (const auto& t : j.at("trees")) model.trees.push_back(trees::tree_from_json(t.dump()));
    for (const auto& e : j.at("importance")) {
        model.column_names.push_back(e.at("name").get<std::string>());
        model.importance.push_back(e.at("value").get<double>());
    }
    const std::size_t d = model.importance.size();
    model.per_tree_importance = Matrix(model.trees.size(), d);
    for (std::size_t k = 0; k < model.trees.size(); ++k) {
        if (model.trees[k].is_stump()) continue;
        const auto imp = tree_feature_importance(model.trees[k], d);
        std::copy(imp.begin(), imp.end(), model.per_tree_importance.row(k));
    }
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

void write_importance_csv(const std::string& path, const ForestModel& model,
                          const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    w.row({"feature", "importance"});
    // Descending by importance; ties by name for a stable file.
    std::vector<std::size_t> order(model.importance.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (model.importance[a] != model.importance[b]) return model.importance[a] > model.importance[b];
        return model.column_names[a] < model.column_names[b];
    });
    for (const auto i : order)
        w.row({model.column_names[i], csv::format_double(model.importance[i])});
}

} // namespace playerval::forest
