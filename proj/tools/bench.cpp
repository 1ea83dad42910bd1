// Serial vs OpenMP timing for the two data-parallel kernels: forest fitting
// and per-player feature aggregation. The outputs must be byte-identical
// across thread counts; this tool reports the speedup and re-checks that.

#include "playerval/features.hpp"
#include "playerval/forest.hpp"
#include "playerval/parallel.hpp"
#include "playerval/synth.hpp"

#include <chrono>
#include <cstdio>
#include <string>

using namespace playerval;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_players = 1500;
    int n_trees = 60;
    if (argc > 1) n_players = static_cast<std::size_t>(std::stoul(argv[1]));
    if (argc > 2) n_trees = std::stoi(argv[2]);

    synth::SynthSpec spec;
    spec.n_players = n_players;
    spec.seed = 7;
    spec.position_pool = {"MD"};
    spec.true_coefficients = {{"total_minutes_on_field", 0.0012}, {"age", 0.05}};
    const auto synth_result = synth::generate_synthetic_corpus(spec);
    std::printf("corpus: %zu players, %zu matches\n", synth_result.corpus.profiles.size(),
                synth_result.corpus.matches.size());

    features::WindowSpec window;
    std::map<std::string, features::FeatureTable> serial_tables, parallel_tables;
    {
        features::BuildOptions opts;
        opts.n_threads = 1;
        const auto start = std::chrono::steady_clock::now();
        serial_tables = features::build_position_tables(synth_result.corpus, window, synth_result.top20_clubs, opts);
        std::printf("feature build   serial:   %7.3f s\n", seconds_since(start));
    }
    {
        features::BuildOptions opts;
        opts.n_threads = 0;
        const auto start = std::chrono::steady_clock::now();
        parallel_tables =
            features::build_position_tables(synth_result.corpus, window, synth_result.top20_clubs, opts);
        std::printf("feature build   parallel: %7.3f s (%d threads)\n", seconds_since(start),
                    hardware_threads());
    }
    const auto& serial_table = serial_tables.begin()->second;
    const auto& parallel_table = parallel_tables.begin()->second;
    std::printf("feature tables identical: %s\n",
                serial_table.X == parallel_table.X && serial_table.y == parallel_table.y ? "yes" : "NO");

    const auto table = features::normalize(serial_table);
    forest::ForestConfig cfg;
    cfg.n_trees = n_trees;
    cfg.seed = 11;

    std::string serial_json, parallel_json;
    {
        auto c = cfg;
        c.n_threads = 1;
        const auto start = std::chrono::steady_clock::now();
        const auto model = forest::fit_forest(table, c);
        std::printf("forest fit      serial:   %7.3f s\n", seconds_since(start));
        serial_json = forest::to_json(model);
    }
    {
        auto c = cfg;
        c.n_threads = 0;
        const auto start = std::chrono::steady_clock::now();
        const auto model = forest::fit_forest(table, c);
        std::printf("forest fit      parallel: %7.3f s (%d threads)\n", seconds_since(start),
                    hardware_threads());
        parallel_json = forest::to_json(model);
    }
    std::printf("forest models identical:  %s\n", serial_json == parallel_json ? "yes" : "NO");
    return serial_json == parallel_json ? 0 : 1;
}
