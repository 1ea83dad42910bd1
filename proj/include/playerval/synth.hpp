#pragma once

#include "playerval/features.hpp"
#include "playerval/ingest.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace playerval::synth {

// Seeded stand-in for the proprietary datasets. Player values are generated
// as exp(intercept + league offset + linear model in the engineered features
// + Gaussian noise), so the explainable variance share is known exactly.
struct SynthSpec {
    std::size_t n_players = 1000;
    int n_leagues = 12;
    std::uint64_t seed = 1;

    // feature name -> coefficient, in log-value units over *raw* feature
    // values. "league_avg_value" scales the per-league offsets.
    std::map<std::string, double> true_coefficients;

    double noise_sd = 0.6;
    // When set, noise_sd is derived so Var(signal)/Var(target) hits this.
    std::optional<double> target_signal_fraction;

    double intercept = 13.5;
    double league_offset_sd = 0.45;
    double second_division_fraction = 0.25;
    double young_fraction = 0.15; // players generated as under-21 prospects
    double missing_height_fraction = 0.03;

    std::vector<std::string> position_pool; // empty = all 8 codes
    int min_matches = 8;
    int max_matches = 16;
    features::WindowSpec window; // the window the values are planted over
};

struct SynthResult {
    ingest::Corpus corpus;
    std::set<std::string> top20_clubs;
    std::map<std::string, int> league_tiers;
    double var_signal = 0.0;
    double noise_sd_used = 0.0;
    double signal_fraction = 0.0; // var_signal / (var_signal + noise_sd^2)
};

SynthResult generate_synthetic_corpus(const SynthSpec& spec);

// matches.csv / values.csv / profiles.csv plus top20_clubs.txt,
// league_tiers.csv, position_aliases.csv and synth_truth.json.
void write_synth_files(const std::string& dir, const SynthResult& result,
                       const std::string& header_comment = "");

SynthSpec read_synth_spec(const std::string& path);

} // namespace playerval::synth
