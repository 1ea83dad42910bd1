#pragma once

#include "playerval/evaluation.hpp"
#include "playerval/features.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace playerval::ranking {

using ingest::PlayerId;

struct YoungTableOptions {
    int horizon_days = 365;       // forecast one year ahead
    int window_days = 365;        // stats from the year up to the last game
    int value_match_tolerance_days = 90; // snapshot search around t + horizon
    int n_threads = 0;
};

// One row per player with first-division appearances before turning 22:
// t = date of his last such game, features aggregated over (t - window, t],
// target ln(value) at the snapshot nearest t + horizon (within tolerance).
// All positions share the table; position codes enter as one-hot columns.
features::FeatureTable build_young_table(const ingest::Corpus& corpus,
                                         const std::set<std::string>& first_division_leagues,
                                         const std::set<std::string>& top20_clubs,
                                         const YoungTableOptions& opts = {});

struct RankedPlayer {
    int rank = 0;
    PlayerId player_id = 0;
    std::string name;
    double predicted_value = 0.0; // currency units
    double predicted_log_value = 0.0;
};

struct RankingReport {
    std::vector<RankedPlayer> entries; // descending predicted value
    bool has_reference = false;
    double kendall_tau_vs_reference = 0.0;
    std::size_t reference_common = 0; // items shared with the reference
    std::string reference_note;
};

// Predictions exponentiated back to currency units, sorted descending; ties
// broken by ascending player id.
RankingReport rank_players(const lasso::LassoModel& model, const features::FeatureTable& table,
                           const std::map<PlayerId, std::string>& names);
RankingReport rank_players(const forest::ForestModel& model, const features::FeatureTable& table,
                           const std::map<PlayerId, std::string>& names);

// Kendall rank correlation between two permutations of the same item set:
// (concordant - discordant) / (n(n-1)/2). Ties are not supported.
double kendall_tau(const std::vector<PlayerId>& ranking_a, const std::vector<PlayerId>& ranking_b);

// Restriction to the reference's top k items (an explicit mode: comparing
// against a published top ten only scores those ten).
double kendall_tau_on_top_k(const std::vector<PlayerId>& reference, const std::vector<PlayerId>& other,
                            std::size_t k);

struct ReferenceRanking {
    std::vector<PlayerId> players; // by ascending rank
};
ReferenceRanking read_reference_ranking(const std::string& path);

// Attaches tau against the overlap between the report and the reference;
// top_k = 0 scores the full common set.
void score_against_reference(RankingReport& report, const ReferenceRanking& reference, std::size_t top_k = 0);

void write_ranking_csv(const std::string& path, const RankingReport& report,
                       const std::string& header_comment = "");
std::string ranking_to_json(const RankingReport& report);
// Plain-text table; top = 0 prints every entry.
std::string ranking_to_text(const RankingReport& report, std::size_t top = 0);

} // namespace playerval::ranking
