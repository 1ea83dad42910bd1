#include "playerval/commands.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"
#include "playerval/evaluation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace playerval::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise("FileNotFound", "cannot write '" + path + "'");
    out << text;
}

// JSON outputs cannot take a '#' comment line; they carry the run stamp as a
// provenance object instead.
std::string with_provenance(const std::string& json_text, const RunConfig& cfg) {
    auto j = ordered_json::parse(json_text);
    ordered_json prov;
    prov["config_hash"] = "0x" + cfg.config_hash_hex;
    prov["seed"] = cfg.seed;
    j["provenance"] = std::move(prov);
    return j.dump(2);
}

void ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

// Config lambda when set, otherwise the largest lambda giving the configured
// active-set size range on this table.
double pick_lambda(const RunConfig& cfg, const features::FeatureTable& raw, std::string* note) {
    if (cfg.lambda > 0.0) {
        if (note) *note = "lambda fixed by config";
        return cfg.lambda;
    }
    const auto normalized = features::normalize(raw);
    const auto sel =
        lasso::select_lambda_for_sparsity(normalized, cfg.lambda_nnz_lo, cfg.lambda_nnz_hi, cfg.lasso_config());
    if (note) {
        *note = "lambda " + csv::format_double(sel.lambda) + " selected for " +
                std::to_string(sel.active_count) + " active features" + (sel.in_range ? "" : " (nearest achievable)");
    }
    return sel.lambda;
}

std::map<std::string, features::FeatureTable> build_tables(const RunConfig& cfg, const LoadedCorpus& loaded) {
    features::BuildOptions opts;
    opts.n_threads = cfg.threads;
    return features::build_position_tables(loaded.joined.corpus, cfg.window, loaded.top20, opts);
}

std::vector<std::string> positions_to_run(const RunConfig& cfg,
                                          const std::map<std::string, features::FeatureTable>& tables) {
    if (cfg.position.empty()) {
        std::vector<std::string> all;
        for (const auto& [code, t] : tables) all.push_back(code);
        return all;
    }
    if (!tables.count(cfg.position))
        raise("EmptyTable", "no dataset for position '" + cfg.position + "'");
    return {cfg.position};
}

void append_reports(const RunConfig& cfg, const features::FeatureTable& raw_table,
                    std::vector<eval::CVReport>& sink) {
    eval::ModelSpec lasso_spec;
    lasso_spec.kind = eval::ModelSpec::Kind::Lasso;
    lasso_spec.lasso = cfg.lasso_config();
    lasso_spec.lasso.lambda = pick_lambda(cfg, raw_table, nullptr);
    sink.push_back(eval::cross_validate(raw_table, lasso_spec, cfg.k_folds, cfg.seed));

    eval::ModelSpec forest_spec;
    forest_spec.kind = eval::ModelSpec::Kind::Forest;
    forest_spec.forest = cfg.forest_config();
    sink.push_back(eval::cross_validate(raw_table, forest_spec, cfg.k_folds, cfg.seed));
}

void write_age_curve(const std::string& path, const lasso::LassoModel& model,
                     const features::FeatureTable& normalized, const std::string& stamp) {
    const auto age_col = normalized.column_index("age");
    const auto age_sq_col = normalized.column_index("age_sq");
    if (!age_col || !age_sq_col) raise("UnknownColumn", "table has no age columns");
    csv::Writer w(path);
    w.comment(stamp);
    w.row({"age", "log_value"});
    for (int age = 16; age <= 40; ++age) {
        // All standardized features at zero except age and its square.
        std::vector<double> x(normalized.d(), 0.0);
        const auto& ns_age = normalized.norm_stats[*age_col];
        const auto& ns_sq = normalized.norm_stats[*age_sq_col];
        x[*age_col] = ns_age.degenerate ? 0.0 : (age - ns_age.mean) / ns_age.scale;
        x[*age_sq_col] =
            ns_sq.degenerate ? 0.0 : (static_cast<double>(age) * age - ns_sq.mean) / ns_sq.scale;
        w.row({std::to_string(age), csv::format_double(lasso::predict(model, x))});
    }
}

} // namespace

LoadedCorpus load_corpus(const RunConfig& cfg) {
    LoadedCorpus loaded;
    loaded.aliases = cfg.position_aliases.empty() ? schema::builtin_aliases()
                                                  : ingest::read_position_aliases(cfg.position_aliases);
    auto matches = ingest::parse_matches(cfg.matches_csv);
    auto valuations = ingest::parse_valuations(cfg.values_csv);
    auto profiles = ingest::parse_profiles(cfg.profiles_csv, loaded.aliases);
    loaded.joined = ingest::join_corpus(std::move(matches), std::move(valuations), std::move(profiles));
    loaded.top20 = ingest::read_club_list(cfg.top20_clubs);
    return loaded;
}

void cmd_ingest(const RunConfig& cfg) {
    validate_inputs(cfg);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);
    const auto& rep = loaded.joined.report;

    ordered_json j;
    j["config_hash"] = cfg.config_hash_hex;
    j["seed"] = cfg.seed;
    j["players_kept"] = rep.players_kept;
    j["match_players_dropped"] = rep.match_players_dropped;
    j["valuation_players_dropped"] = rep.valuation_players_dropped;
    j["profile_players_dropped"] = rep.profile_players_dropped;
    j["match_rows_dropped"] = rep.match_rows_dropped;
    j["valuation_rows_dropped"] = rep.valuation_rows_dropped;
    j["match_rows"] = loaded.joined.corpus.matches.size();
    j["valuation_rows"] = loaded.joined.corpus.valuations.size();
    write_text(cfg.out_dir + "/ingest_report.json", j.dump(2) + "\n");

    std::printf("players kept: %zu (dropped: %zu from matches, %zu from values, %zu from profiles)\n",
                rep.players_kept, rep.match_players_dropped, rep.valuation_players_dropped,
                rep.profile_players_dropped);
    std::printf("match rows: %zu, valuation rows: %zu\n", loaded.joined.corpus.matches.size(),
                loaded.joined.corpus.valuations.size());
}

void cmd_features(const RunConfig& cfg) {
    validate_inputs(cfg);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);
    const auto tables = build_tables(cfg, loaded);
    for (const auto& [code, raw] : tables) {
        const auto normalized = features::normalize(raw);
        features::write_feature_csv(cfg.out_dir + "/features_" + code + ".csv", normalized, cfg.stamp());
        std::printf("features_%s.csv: %zu rows x %zu columns\n", code.c_str(), normalized.n(), normalized.d());
    }
}

void cmd_train(const RunConfig& cfg) {
    validate_inputs(cfg);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);
    const auto tables = build_tables(cfg, loaded);
    for (const auto& code : positions_to_run(cfg, tables)) {
        const auto& raw = tables.at(code);
        const auto normalized = features::normalize(raw);
        std::string log = cfg.stamp() + "\nposition " + code + ", n=" + std::to_string(raw.n()) + "\n";
        if (cfg.model == "lasso") {
            auto lcfg = cfg.lasso_config();
            std::string note;
            lcfg.lambda = pick_lambda(cfg, raw, &note);
            const auto model = lasso::fit_lasso(normalized, lcfg);
            write_text(cfg.out_dir + "/model_" + code + "_lasso.json", with_provenance(lasso::to_json(model), cfg) + "\n");
            log += note + "\n";
            log += "converged=" + std::string(model.converged ? "true" : "false") +
                   " sweeps=" + std::to_string(model.sweeps_used) +
                   " kkt_residual=" + csv::format_double(model.kkt_residual) +
                   " active=" + std::to_string(model.active_set.size()) + "\n";
        } else {
            const auto model = forest::fit_forest(normalized, cfg.forest_config());
            write_text(cfg.out_dir + "/model_" + code + "_forest.json", with_provenance(forest::to_json(model), cfg) + "\n");
            log += "trees=" + std::to_string(model.trees.size()) +
                   " no_splits=" + std::string(model.no_splits ? "true" : "false") + "\n";
        }
        write_text(cfg.out_dir + "/train_log_" + code + "_" + cfg.model + ".txt", log);
        std::printf("trained %s on %s (n=%zu)\n", cfg.model.c_str(), code.c_str(), raw.n());
    }
}

void cmd_evaluate(const RunConfig& cfg) {
    validate_inputs(cfg);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);
    const auto tables = build_tables(cfg, loaded);

    std::vector<eval::CVReport> with_league, without_league;
    for (const auto& code : positions_to_run(cfg, tables)) {
        const auto& raw = tables.at(code);
        if (cfg.include_league_feature) append_reports(cfg, raw, with_league);
        const auto stripped = features::drop_column(raw, "league_avg_value");
        append_reports(cfg, stripped, without_league);
    }
    if (cfg.include_league_feature)
        eval::write_cv_reports_csv(cfg.out_dir + "/cv_with_league.csv", with_league, cfg.stamp());
    eval::write_cv_reports_csv(cfg.out_dir + "/cv_without_league.csv", without_league, cfg.stamp());

    ordered_json all = ordered_json::array();
    for (const auto& r : with_league) {
        auto j = ordered_json::parse(eval::cv_report_to_json(r));
        j["league_feature"] = true;
        all.push_back(std::move(j));
    }
    for (const auto& r : without_league) {
        auto j = ordered_json::parse(eval::cv_report_to_json(r));
        j["league_feature"] = false;
        all.push_back(std::move(j));
    }
    ordered_json doc;
    doc["reports"] = std::move(all);
    write_text(cfg.out_dir + "/cv_reports.json", with_provenance(doc.dump(2), cfg) + "\n");

    for (const auto& r : with_league)
        std::printf("%s %-6s (with league)    mse=%.4f r2=%.3f\n", r.position_code.c_str(), r.model_kind.c_str(),
                    r.mse_cv, r.r2_cv);
    for (const auto& r : without_league)
        std::printf("%s %-6s (without league) mse=%.4f r2=%.3f\n", r.position_code.c_str(), r.model_kind.c_str(),
                    r.mse_cv, r.r2_cv);
}

void cmd_importance(const RunConfig& cfg) {
    validate_inputs(cfg);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);
    const auto tables = build_tables(cfg, loaded);
    for (const auto& code : positions_to_run(cfg, tables)) {
        const auto& raw = tables.at(code);
        const auto normalized = features::normalize(raw);

        auto lcfg = cfg.lasso_config();
        lcfg.lambda = pick_lambda(cfg, raw, nullptr);
        const auto lasso_model = lasso::fit_lasso(normalized, lcfg);
        {
            csv::Writer w(cfg.out_dir + "/lasso_coefficients_" + code + ".csv");
            w.comment(cfg.stamp());
            w.row({"feature", "coefficient"});
            std::vector<std::size_t> order;
            for (std::size_t i = 0; i < lasso_model.coefficients.size(); ++i)
                if (lasso_model.coefficients[i] != 0.0) order.push_back(i);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double ma = std::abs(lasso_model.coefficients[a]);
                const double mb = std::abs(lasso_model.coefficients[b]);
                if (ma != mb) return ma > mb;
                return lasso_model.column_names[a] < lasso_model.column_names[b];
            });
            for (const auto i : order)
                w.row({lasso_model.column_names[i], csv::format_double(lasso_model.coefficients[i])});
        }

        const auto forest_model = forest::fit_forest(normalized, cfg.forest_config());
        forest::write_importance_csv(cfg.out_dir + "/forest_importance_" + code + ".csv", forest_model,
                                     cfg.stamp());

        write_age_curve(cfg.out_dir + "/age_curve_" + code + ".csv", lasso_model, normalized, cfg.stamp());
        std::printf("importance written for %s (lasso active=%zu)\n", code.c_str(),
                    lasso_model.active_set.size());
    }
}

void cmd_rank(const RunConfig& cfg) {
    validate_inputs(cfg, /*need_tiers=*/true);
    ensure_out_dir(cfg);
    const auto loaded = load_corpus(cfg);

    const auto tiers = ingest::read_league_tiers(cfg.league_tiers);
    std::set<std::string> first_division;
    for (const auto& [league, tier] : tiers)
        if (tier == 1) first_division.insert(league);

    auto young_opts = cfg.young;
    young_opts.n_threads = cfg.threads;
    const auto raw = ranking::build_young_table(loaded.joined.corpus, first_division, loaded.top20, young_opts);
    const auto normalized = features::normalize(raw);

    std::map<ingest::PlayerId, std::string> names;
    for (const auto& [id, p] : loaded.joined.corpus.profiles) names[id] = p.name;

    ranking::RankingReport report;
    if (cfg.model == "forest") {
        const auto model = forest::fit_forest(normalized, cfg.forest_config());
        report = ranking::rank_players(model, normalized, names);
    } else {
        auto lcfg = cfg.lasso_config();
        lcfg.lambda = pick_lambda(cfg, raw, nullptr);
        const auto model = lasso::fit_lasso(normalized, lcfg);
        report = ranking::rank_players(model, normalized, names);
    }

    if (!cfg.reference_ranking.empty()) {
        const auto reference = ranking::read_reference_ranking(cfg.reference_ranking);
        ranking::score_against_reference(report, reference, cfg.reference_top_k);
    }

    ranking::write_ranking_csv(cfg.out_dir + "/ranking.csv", report, cfg.stamp());
    write_text(cfg.out_dir + "/ranking.json", with_provenance(ranking::ranking_to_json(report), cfg) + "\n");
    write_text(cfg.out_dir + "/ranking.txt", ranking::ranking_to_text(report));
    std::printf("%s", ranking::ranking_to_text(report, 13).c_str());
}

void cmd_synth(const std::string& spec_path, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override) {
    auto spec = synth::read_synth_spec(spec_path);
    if (seed_override) spec.seed = *seed_override;
    std::filesystem::create_directories(out_dir);
    const auto result = synth::generate_synthetic_corpus(spec);

    char stamp[64];
    std::snprintf(stamp, sizeof(stamp), "config_hash=0x%016llx seed=%llu",
                  static_cast<unsigned long long>(kv::fnv1a(spec_path)),
                  static_cast<unsigned long long>(spec.seed));
    synth::write_synth_files(out_dir, result, stamp);

    // A ready-to-run config pointing at the generated files.
    std::string config_text;
    config_text += "matches_csv = " + out_dir + "/matches.csv\n";
    config_text += "values_csv = " + out_dir + "/values.csv\n";
    config_text += "profiles_csv = " + out_dir + "/profiles.csv\n";
    config_text += "top20_clubs = " + out_dir + "/top20_clubs.txt\n";
    config_text += "position_aliases = " + out_dir + "/position_aliases.csv\n";
    config_text += "league_tiers = " + out_dir + "/league_tiers.csv\n";
    config_text += "out_dir = " + out_dir + "/run\n";
    config_text += "seed = " + std::to_string(spec.seed) + "\n";
    write_text(out_dir + "/config.toml", config_text);

    std::printf("synthetic corpus: %zu players, %zu matches, %zu valuations\n",
                result.corpus.profiles.size(), result.corpus.matches.size(), result.corpus.valuations.size());
    std::printf("signal fraction: %.4f (var_signal=%.4f, noise_sd=%.4f)\n", result.signal_fraction,
                result.var_signal, result.noise_sd_used);
}

} // namespace playerval::cli
