#include "playerval/commands.hpp"
#include "playerval/error.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<long long> seed;
    std::string out_dir;
    std::string position;
    std::string model;
    std::string reference;
    long long reference_top_k = -1;
    bool no_league_feature = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "run configuration file");
    if (needs_config) opt->required();
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--out", flags.out_dir, "override the output directory");
    cmd->add_option("--position", flags.position, "restrict to one position code (GK..FWD)");
    cmd->add_option("--model", flags.model, "model kind: lasso or forest");
    cmd->add_option("--reference", flags.reference, "reference ranking CSV (rank,player_id)");
    cmd->add_option("--reference-top-k", flags.reference_top_k,
                    "score Kendall tau on the reference's top k only");
    cmd->add_flag("--no-league-feature", flags.no_league_feature,
                  "evaluate without the league average value feature");
    cmd->add_option("--threads", flags.threads, "worker threads (1 = serial)");
}

playerval::cli::RunConfig make_config(const CommonFlags& flags) {
    auto cfg = playerval::cli::load_run_config(flags.config_path);
    if (flags.seed) {
        cfg.seed = static_cast<std::uint64_t>(*flags.seed);
        cfg.seed_set = true;
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.position.empty()) cfg.position = flags.position;
    if (!flags.model.empty()) cfg.model = flags.model;
    if (!flags.reference.empty()) cfg.reference_ranking = flags.reference;
    if (flags.reference_top_k >= 0) cfg.reference_top_k = static_cast<std::size_t>(flags.reference_top_k);
    if (flags.no_league_feature) cfg.include_league_feature = false;
    if (flags.threads >= 0) cfg.threads = flags.threads;
    playerval::cli::finalize(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"playerval - market value regression pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string synth_spec, synth_out = "synth";

    auto* ingest = app.add_subcommand("ingest", "parse and join the three datasets");
    add_common(ingest, flags);
    auto* features = app.add_subcommand("features", "write per-position feature tables");
    add_common(features, flags);
    auto* train = app.add_subcommand("train", "fit a model per position and save it");
    add_common(train, flags);
    auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation report");
    add_common(evaluate, flags);
    auto* importance = app.add_subcommand("importance", "coefficients, importances, age curve");
    add_common(importance, flags);
    auto* rank = app.add_subcommand("rank", "young-player value ranking");
    add_common(rank, flags);

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--spec", synth_spec, "synthetic corpus spec file")->required();
    synth->add_option("--out", synth_out, "output directory");
    std::optional<long long> synth_seed;
    synth->add_option("--seed", synth_seed, "override the spec seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            std::optional<std::uint64_t> seed;
            if (synth_seed) seed = static_cast<std::uint64_t>(*synth_seed);
            playerval::cli::cmd_synth(synth_spec, synth_out, seed);
            return 0;
        }
        const auto cfg = make_config(flags);
        if (ingest->parsed()) playerval::cli::cmd_ingest(cfg);
        else if (features->parsed()) playerval::cli::cmd_features(cfg);
        else if (train->parsed()) playerval::cli::cmd_train(cfg);
        else if (evaluate->parsed()) playerval::cli::cmd_evaluate(cfg);
        else if (importance->parsed()) playerval::cli::cmd_importance(cfg);
        else if (rank->parsed()) playerval::cli::cmd_rank(cfg);
    } catch (const playerval::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "InternalError: %s\n", e.what());
        return 1;
    }
    return 0;
}
