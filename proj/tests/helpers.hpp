#pragma once

#include "playerval/features.hpp"
#include "playerval/ingest.hpp"
#include "playerval/matrix.hpp"
#include "playerval/rng.hpp"
#include "playerval/trees.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

// Nested descriptor for hand-built trees (worked examples in tests).
struct NodeSpec {
    int feature = -1;
    double threshold = 0.0;
    double prediction = 0.0;
    int n_samples = 0;
    double impurity = 0.0;
    const NodeSpec* left = nullptr;
    const NodeSpec* right = nullptr;
};

inline int append_node(playerval::trees::Tree& tree, const NodeSpec& spec) {
    const auto id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    {
        auto& node = tree.nodes.back();
        node.feature = spec.feature;
        node.threshold = spec.threshold;
        node.prediction = spec.prediction;
        node.n_samples = spec.n_samples;
        node.impurity = spec.impurity;
    }
    if (spec.feature >= 0) {
        const int l = append_node(tree, *spec.left);
        const int r = append_node(tree, *spec.right);
        tree.nodes[static_cast<std::size_t>(id)].left = l;
        tree.nodes[static_cast<std::size_t>(id)].right = r;
    }
    return id;
}

inline NodeSpec leaf_spec(double v, int n = 0, double impurity = 0.0) {
    NodeSpec s;
    s.prediction = v;
    s.n_samples = n;
    s.impurity = impurity;
    return s;
}

inline NodeSpec inner_spec(int feature, double thr, const NodeSpec& l, const NodeSpec& r, int n = 0,
                           double impurity = 0.0) {
    NodeSpec s;
    s.feature = feature;
    s.threshold = thr;
    s.left = &l;
    s.right = &r;
    s.n_samples = n;
    s.impurity = impurity;
    return s;
}

inline std::string make_temp_dir(const std::string& tag) {
    auto tmpl = (std::filesystem::temp_directory_path() / (tag + "-XXXXXX")).string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    return std::string(buf.data());
}

inline playerval::ingest::MatchRecord make_match(playerval::ingest::PlayerId id, const std::string& date,
                                                 const std::string& league, double minutes,
                                                 double goals = 0.0) {
    using namespace playerval;
    ingest::MatchRecord rec;
    rec.player_id = id;
    rec.match_date = parse_date(date);
    rec.league_id = league;
    rec.stats.assign(schema::stat_count(), 0.0);
    const auto& wk = schema::well_known();
    rec.stats[wk.matches] = minutes > 0.0 ? 1.0 : 0.0;
    rec.stats[wk.minutes] = minutes;
    rec.stats[wk.goals] = goals;
    return rec;
}

inline void set_stat(playerval::ingest::MatchRecord& rec, const std::string& name, double value) {
    rec.stats[playerval::schema::stat_index(name).value()] = value;
}

inline playerval::ingest::PlayerProfile make_profile(playerval::ingest::PlayerId id, const std::string& birth,
                                                     std::set<std::string> codes, const std::string& league,
                                                     double height = 180.0, const std::string& youth = "") {
    playerval::ingest::PlayerProfile p;
    p.player_id = id;
    p.name = "P" + std::to_string(id);
    p.birth_date = playerval::parse_date(birth);
    p.positions = codes; // tests use codes directly as labels
    p.position_codes = std::move(codes);
    p.league_id = league;
    p.youth_club = youth;
    p.height_cm = height;
    return p;
}

// Random regression table with continuous columns; columns are centered so
// the lasso intercept contract holds.
inline playerval::features::FeatureTable random_table(std::size_t n, std::size_t d, playerval::Rng& rng,
                                                      bool centered = true) {
    using namespace playerval;
    features::FeatureTable t;
    t.position_code = "TEST";
    t.X = Matrix(n, d);
    for (std::size_t c = 0; c < d; ++c) {
        t.columns.push_back("x" + std::to_string(c));
        t.kinds.push_back(features::ColumnKind::Continuous);
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) t.X.at(r, c) = rng.normal();
    if (centered) {
        for (std::size_t c = 0; c < d; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) mean += t.X.at(r, c);
            mean /= static_cast<double>(n);
            for (std::size_t r = 0; r < n; ++r) t.X.at(r, c) -= mean;
        }
    }
    t.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) t.y[r] = rng.normal();
    t.player_ids.resize(n, 0);
    return t;
}

} // namespace testutil
