#include "playerval/synth.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"
#include "playerval/kvfile.hpp"
#include "playerval/rng.hpp"
#include "playerval/stats_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace playerval::synth {

namespace {

using ingest::MatchRecord;
using ingest::PlayerProfile;
using ingest::ValuationSnapshot;

std::size_t sid(const char* name) { return schema::stat_index(name).value(); }

// Latent per-player game profile; every stat of a match derives from these
// rates so that window aggregates vary smoothly between players.
struct Skills {
    double minutes_mu;
    double pass_rate, pass_acc, sub_acc;
    double shot_rate, on_target_p, goal_conv, xg_per_shot;
    double assist_rate;
    double duel_rate, duel_win;
    double recovery_rate, loss_rate;
    double action_rate_def, action_rate_att;
    double touch_box_rate, received_rate;
    double dribble_rate, dribble_acc;
    bool goalkeeper;
};

Skills draw_skills(Rng& rng, const std::set<std::string>& codes) {
    const bool gk = codes.count("GK") != 0;
    const bool attacking = codes.count("FWD") || codes.count("WG") || codes.count("AM");
    const bool defensive = codes.count("CD") || codes.count("FB") || codes.count("CDM");
    Skills s{};
    s.goalkeeper = gk;
    s.minutes_mu = rng.uniform(55.0, 92.0);
    s.pass_rate = rng.uniform(0.35, 0.95);
    s.pass_acc = rng.uniform(0.62, 0.94);
    s.sub_acc = rng.uniform(0.45, 0.85);
    s.shot_rate = gk ? 0.0005 : attacking ? rng.uniform(0.02, 0.06) : rng.uniform(0.004, 0.025);
    s.on_target_p = rng.uniform(0.28, 0.5);
    s.goal_conv = rng.uniform(0.15, 0.45); // of on-target shots
    s.xg_per_shot = rng.uniform(0.06, 0.18);
    s.assist_rate = attacking ? rng.uniform(0.003, 0.014) : rng.uniform(0.001, 0.006);
    s.duel_rate = rng.uniform(0.15, 0.45);
    s.duel_win = rng.uniform(0.35, 0.65);
    s.recovery_rate = defensive ? rng.uniform(0.06, 0.14) : rng.uniform(0.03, 0.08);
    s.loss_rate = rng.uniform(0.04, 0.12);
    s.action_rate_def = defensive ? rng.uniform(0.08, 0.2) : rng.uniform(0.02, 0.08);
    s.action_rate_att = attacking ? rng.uniform(0.08, 0.2) : rng.uniform(0.02, 0.08);
    s.touch_box_rate = attacking ? rng.uniform(0.02, 0.08) : rng.uniform(0.002, 0.02);
    s.received_rate = rng.uniform(0.2, 0.6);
    s.dribble_rate = attacking ? rng.uniform(0.02, 0.1) : rng.uniform(0.005, 0.04);
    s.dribble_acc = rng.uniform(0.4, 0.75);
    return s;
}

MatchRecord make_match(Rng& rng, const Skills& s, ingest::PlayerId id, Date date,
                       const std::string& league) {
    MatchRecord rec;
    rec.player_id = id;
    rec.match_date = date;
    rec.league_id = league;
    rec.stats.assign(schema::stat_count(), 0.0);
    auto put = [&](const char* name, double v) { rec.stats[sid(name)] = v; };

    const int minutes = std::clamp(static_cast<int>(std::lround(rng.normal(s.minutes_mu, 14.0))), 12, 96);
    const double m = minutes;
    put("total_matches", 1.0);
    put("total_minutes_on_field", m);

    // Passing tree: subtype attempts are thinned from total passes, subtype
    // successes thinned from attempts, so every capped pair holds.
    const int passes = rng.poisson(s.pass_rate * m);
    const int succ_passes = rng.binomial(passes, s.pass_acc);
    put("total_passes", passes);
    put("total_successful_passes", succ_passes);
    const std::pair<const char*, double> subtypes[] = {
        {"smart_passes", 0.04},   {"passes_to_final_third", 0.12}, {"crosses", 0.05},
        {"forward_passes", 0.3},  {"back_passes", 0.18},           {"through_passes", 0.03},
        {"key_passes", 0.025},    {"vertical_passes", 0.14},       {"long_passes", 0.1},
        {"progressive_passes", 0.11}, {"lateral_passes", 0.16},
    };
    for (const auto& [base, frac] : subtypes) {
        const int attempts = rng.binomial(passes, frac);
        const int success = rng.binomial(attempts, s.sub_acc);
        rec.stats[sid(("total_" + std::string(base)).c_str())] = attempts;
        rec.stats[sid(("total_successful_" + std::string(base)).c_str())] = success;
    }

    const int shots = rng.poisson(s.shot_rate * m);
    const int on_target = rng.binomial(shots, s.on_target_p);
    const int goals = rng.binomial(on_target, s.goal_conv);
    put("total_shots", shots);
    put("total_shots_on_target", on_target);
    put("total_goals", goals);
    put("total_head_shots", rng.binomial(shots, 0.15));
    double xg = 0.0;
    for (int i = 0; i < shots; ++i) xg += rng.uniform(0.02, 2.0 * s.xg_per_shot);
    put("total_xg_shot", xg);

    const int assists = rng.poisson(s.assist_rate * m);
    put("total_assists", assists);
    put("total_xg_assist", assists * rng.uniform(0.15, 0.5) + 0.05 * rng.poisson(0.4));
    const int shot_assists = rng.poisson(0.02 * m);
    put("total_shot_assists", shot_assists);
    put("total_shot_on_target_assists", rng.binomial(shot_assists, 0.4));
    put("total_second_assists", rng.poisson(0.002 * m));
    put("total_third_assists", rng.poisson(0.001 * m));

    const int duels = rng.poisson(s.duel_rate * m);
    const int duels_won = rng.binomial(duels, s.duel_win);
    put("total_duels", duels);
    put("total_duels_won", duels_won);
    const int def_duels = rng.binomial(duels, 0.4);
    put("total_defensive_duels", def_duels);
    put("total_defensive_duels_won", rng.binomial(def_duels, s.duel_win));
    const int off_duels = rng.binomial(duels, 0.3);
    put("total_offensive_duels", off_duels);
    put("total_offensive_duels_won", rng.binomial(off_duels, s.duel_win));
    const int aerial = rng.binomial(duels, 0.2);
    put("total_aerial_duels", aerial);
    put("total_aerial_duels_won", rng.binomial(aerial, s.duel_win));
    const int field_aerial = rng.binomial(aerial, 0.9);
    put("total_field_aerial_duels", field_aerial);
    put("total_field_aerial_duels_won", rng.binomial(field_aerial, s.duel_win));
    const int pressing = rng.poisson(0.08 * m);
    put("total_pressing_duels", pressing);
    put("total_pressing_duels_won", rng.binomial(pressing, s.duel_win));
    const int loose = rng.poisson(0.04 * m);
    put("total_loose_ball_duels", loose);
    put("total_loose_ball_duels_won", rng.binomial(loose, 0.5));
    const int against = rng.poisson(0.05 * m);
    put("total_dribbles_against", against);
    put("total_dribbles_against_won", rng.binomial(against, 0.55));
    put("total_new_duels_won", rng.binomial(duels_won, 0.9));
    put("total_new_defensive_duels_won", rng.binomial(def_duels, 0.5));
    put("total_new_offensive_duels_won", rng.binomial(off_duels, 0.5));

    const int dribbles = rng.poisson(s.dribble_rate * m);
    put("total_dribbles", dribbles);
    const int succ_dribbles = rng.binomial(dribbles, s.dribble_acc);
    put("total_successful_dribbles", succ_dribbles);
    put("total_new_successful_dribbles", rng.binomial(succ_dribbles, 0.9));

    const int recoveries = rng.poisson(s.recovery_rate * m);
    const int opp_half = rng.binomial(recoveries, 0.4);
    put("total_recoveries", recoveries);
    put("total_opponent_half_recoveries", opp_half);
    put("total_dangerous_opponent_half_recoveries", rng.binomial(opp_half, 0.3));
    put("total_counterpressing_recoveries", rng.binomial(recoveries, 0.35));
    const int losses = rng.poisson(s.loss_rate * m);
    const int own_half = rng.binomial(losses, 0.45);
    put("total_losses", losses);
    put("total_own_half_losses", own_half);
    put("total_dangerous_own_half_losses", rng.binomial(own_half, 0.25));

    const int def_actions = rng.poisson(s.action_rate_def * m);
    put("total_defensive_actions", def_actions);
    put("total_successful_defensive_actions", rng.binomial(def_actions, 0.7));
    const int att_actions = rng.poisson(s.action_rate_att * m);
    put("total_attacking_actions", att_actions);
    put("total_successful_attacking_actions", rng.binomial(att_actions, 0.5));

    const int linkups = rng.poisson(0.04 * m);
    put("total_linkup_plays", linkups);
    put("total_successful_linkup_plays", rng.binomial(linkups, 0.6));

    const int fk = rng.poisson(0.008 * m);
    put("total_free_kicks", fk);
    put("total_free_kicks_on_target", rng.binomial(fk, 0.3));
    const int direct_fk = rng.binomial(fk, 0.5);
    put("total_direct_free_kicks", direct_fk);
    put("total_direct_free_kicks_on_target", rng.binomial(direct_fk, 0.3));
    const int pens = rng.poisson(0.0015 * m);
    put("total_penalties", pens);
    put("total_successful_penalties", rng.binomial(pens, 0.78));
    put("total_corners", rng.poisson(0.01 * m));

    const int slides = rng.poisson(0.01 * m);
    put("total_sliding_tackles", slides);
    put("total_successful_sliding_tackles", rng.binomial(slides, 0.6));

    put("total_interceptions", rng.poisson(0.05 * m));
    put("total_clearances", rng.poisson(0.04 * m));
    put("total_shots_blocked", rng.poisson(0.01 * m));
    put("total_fouls", rng.poisson(0.015 * m));
    put("total_fouls_suffered", rng.poisson(0.015 * m));
    put("total_offsides", rng.poisson(0.006 * m));
    put("total_accelerations", rng.poisson(0.02 * m));
    put("total_progressive_run", rng.poisson(0.03 * m));
    put("total_missed_balls", rng.poisson(0.01 * m));
    put("total_received_pass", rng.poisson(s.received_rate * m));
    put("total_touch_in_box", rng.poisson(s.touch_box_rate * m));
    put("total_yellow_cards", rng.uniform() < 0.14 ? 1.0 : 0.0);
    const bool red = rng.uniform() < 0.008;
    put("total_red_cards", red ? 1.0 : 0.0);
    put("total_direct_red_cards", red && rng.uniform() < 0.5 ? 1.0 : 0.0);

    if (s.goalkeeper) {
        const int conceded = rng.poisson(1.2);
        const int saves = rng.poisson(2.4);
        put("total_gk_conceded_goals", conceded);
        put("total_gk_saves", saves);
        put("total_gk_shots_against", conceded + saves);
        put("total_gk_clean_sheets", conceded == 0 ? 1.0 : 0.0);
        put("total_xg_save", saves * rng.uniform(0.05, 0.25));
        const int exits = rng.poisson(0.02 * m);
        put("total_gk_exits", exits);
        put("total_gk_successful_exits", rng.binomial(exits, 0.8));
        const int gk_air = rng.poisson(0.012 * m);
        put("total_gk_aerial_duels", gk_air);
        put("total_gk_aerial_duels_won", rng.binomial(gk_air, 0.7));
        const int kicks = rng.poisson(0.07 * m);
        const int short_kicks = rng.binomial(kicks, 0.55);
        put("total_goal_kicks", kicks);
        put("total_goal_kicks_short", short_kicks);
        put("total_goal_kicks_long", kicks - short_kicks);
        put("total_successful_goal_kicks", rng.binomial(kicks, 0.75));
    }
    return rec;
}

} // namespace

SynthResult generate_synthetic_corpus(const SynthSpec& spec) {
    if (spec.n_players < 2) raise("TooFewSamples", "need at least 2 synthetic players");
    if (spec.n_leagues < 1) raise("TooFewSamples", "need at least 1 league");
    if (spec.target_signal_fraction &&
        (*spec.target_signal_fraction <= 0.0 || *spec.target_signal_fraction > 1.0))
        raise("MalformedRow", "target_signal_fraction must lie in (0, 1]");

    SynthResult result;
    Rng master(spec.seed);

    // Leagues: stable ids, top-tier first, distinct value scales.
    std::vector<std::string> league_ids;
    std::vector<double> league_offsets;
    const int tier1 = std::max(1, static_cast<int>(std::lround(
                                      spec.n_leagues * (1.0 - spec.second_division_fraction))));
    for (int l = 0; l < spec.n_leagues; ++l) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "L%02d", l + 1);
        league_ids.emplace_back(buf);
        result.league_tiers[buf] = l < tier1 ? 1 : 2;
        league_offsets.push_back(master.normal(0.0, spec.league_offset_sd));
    }

    for (int c = 1; c <= 20; ++c) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "Academy %02d", c);
        result.top20_clubs.insert(buf);
    }

    std::vector<std::string> pool = spec.position_pool;
    if (pool.empty())
        for (const auto code : schema::kPositionCodes) pool.emplace_back(code);
    for (const auto& code : pool)
        if (!schema::is_position_code(code))
            raise("UnknownPosition", "position pool entry '" + code + "' is not a code");

    const Date base_date = make_date(2022, 3, 1);

    struct PlayerDraft {
        ingest::PlayerId id;
        Date value_date;
        double noise_z, drift_z1, drift_z2;
        Skills skills;
    };

    auto& corpus = result.corpus;
    std::vector<PlayerDraft> drafts;
    drafts.reserve(spec.n_players);

    for (std::size_t i = 0; i < spec.n_players; ++i) {
        Rng rng(split_seed(spec.seed, i + 1));
        PlayerDraft draft;
        draft.id = static_cast<ingest::PlayerId>(1000 + i);

        PlayerProfile profile;
        profile.player_id = draft.id;
        char nbuf[24];
        std::snprintf(nbuf, sizeof(nbuf), "Player %05zu", i + 1);
        profile.name = nbuf;

        const auto& league = league_ids[rng.below(league_ids.size())];
        profile.league_id = league;

        profile.positions.insert(pool[rng.below(pool.size())]);
        if (pool.size() > 1 && rng.uniform() < 0.12) profile.positions.insert(pool[rng.below(pool.size())]);
        profile.position_codes = profile.positions; // pool entries are codes

        draft.value_date = base_date.plus_days(static_cast<std::int32_t>(rng.below(241)) - 120);

        const bool young = rng.uniform() < spec.young_fraction;
        const double age_at_value = young ? rng.uniform(20.2, 21.3) : rng.uniform(21.6, 34.0);
        profile.birth_date = draft.value_date.plus_days(-static_cast<std::int32_t>(std::lround(age_at_value * 365.25)));

        draft.skills = draw_skills(rng, profile.position_codes);
        profile.height_cm = rng.uniform() < spec.missing_height_fraction
                                ? 0.0
                                : std::clamp(rng.normal(draft.skills.goalkeeper ? 188.0 : 181.0, 6.0), 164.0, 206.0);
        char cbuf[24];
        std::snprintf(cbuf, sizeof(cbuf), "Academy %02d", static_cast<int>(rng.below(60)) + 1);
        profile.youth_club = cbuf;

        // Matches spread through the scoring window.
        const Date w_from = draft.value_date.plus_days(-(spec.window.horizon_days + spec.window.window_length_days));
        const int span = spec.window.window_length_days;
        const int n_matches = spec.min_matches +
                              static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_matches - spec.min_matches + 1)));
        Date prev = w_from.plus_days(-1);
        for (int k = 0; k < n_matches; ++k) {
            const double slot = span * (k + rng.uniform() * 0.9) / n_matches;
            Date date = w_from.plus_days(static_cast<std::int32_t>(slot));
            if (!(prev < date)) date = prev.plus_days(1);
            if (!(date.days < w_from.days + span)) break;
            prev = date;
            corpus.matches.push_back(make_match(rng, draft.skills, draft.id, date, league));
        }

        draft.noise_z = rng.normal();
        draft.drift_z1 = rng.normal();
        draft.drift_z2 = rng.normal();
        drafts.push_back(draft);
        corpus.profiles.emplace(draft.id, std::move(profile));
    }

    // Planted systematic part, from the features the pipeline will recompute.
    const auto& layout = features::FeatureLayout::base();
    std::vector<std::pair<std::size_t, double>> coef_ids;
    double league_gain = 1.0;
    for (const auto& [name, coef] : spec.true_coefficients) {
        if (name == "league_avg_value") {
            league_gain = coef;
            continue;
        }
        coef_ids.emplace_back(layout.index_of(name), coef);
    }
    const std::size_t height_col = layout.index_of("height");
    const std::size_t height_sq_col = layout.index_of("height_sq");

    const features::LeagueValueIndex no_values(corpus); // no valuations yet
    const std::set<std::string> top20 = result.top20_clubs;

    std::vector<double> signal(drafts.size(), 0.0);
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        const auto& draft = drafts[i];
        const auto& profile = corpus.profiles.at(draft.id);
        const auto agg = features::aggregate_window(corpus, draft.id, draft.value_date, spec.window);
        const auto row = features::assemble_row(layout, agg, profile, draft.value_date, no_values, top20);
        double lin = 0.0;
        for (const auto& [col, coef] : coef_ids) {
            double v = row[col];
            if (std::isnan(v)) // missing height: plant at the population center
                v = col == height_col ? 181.0 : col == height_sq_col ? 181.0 * 181.0 : 0.0;
            lin += coef * v;
        }
        const auto league_pos = std::find(league_ids.begin(), league_ids.end(), profile.league_id);
        signal[i] = lin + league_gain * league_offsets[static_cast<std::size_t>(league_pos - league_ids.begin())];
    }

    result.var_signal = population_variance(signal);
    result.noise_sd_used = spec.noise_sd;
    if (spec.target_signal_fraction) {
        const double s = *spec.target_signal_fraction;
        result.noise_sd_used = s >= 1.0 ? 0.0 : std::sqrt(result.var_signal * (1.0 - s) / s);
    }
    const double noise_var = result.noise_sd_used * result.noise_sd_used;
    result.signal_fraction =
        result.var_signal + noise_var > 0.0 ? result.var_signal / (result.var_signal + noise_var) : 0.0;

    // Center the systematic part so `intercept` is the mean log value and
    // magnitudes stay in a realistic currency range.
    const double signal_mean = mean_of(signal);

    for (std::size_t i = 0; i < drafts.size(); ++i) {
        const auto& draft = drafts[i];
        const double log_value =
            spec.intercept + (signal[i] - signal_mean) + result.noise_sd_used * draft.noise_z;
        corpus.valuations.push_back(
            {draft.id, draft.value_date.plus_days(-730), std::exp(log_value - 0.18 + 0.05 * draft.drift_z1)});
        corpus.valuations.push_back(
            {draft.id, draft.value_date.plus_days(-365), std::exp(log_value - 0.09 + 0.05 * draft.drift_z2)});
        corpus.valuations.push_back({draft.id, draft.value_date, std::exp(log_value)});
    }

    // Canonical corpus order (players were generated with ascending ids and
    // dates, but keep the guarantee explicit).
    std::sort(corpus.matches.begin(), corpus.matches.end(), [](const MatchRecord& a, const MatchRecord& b) {
        return std::tie(a.player_id, a.match_date.days) < std::tie(b.player_id, b.match_date.days);
    });
    std::sort(corpus.valuations.begin(), corpus.valuations.end(),
              [](const ValuationSnapshot& a, const ValuationSnapshot& b) {
                  return std::tie(a.player_id, a.value_date.days) < std::tie(b.player_id, b.value_date.days);
              });
    return result;
}

void write_synth_files(const std::string& dir, const SynthResult& result, const std::string& header_comment) {
    ingest::write_matches_csv(dir + "/matches.csv", result.corpus.matches, header_comment);
    ingest::write_valuations_csv(dir + "/values.csv", result.corpus.valuations, header_comment);
    ingest::write_profiles_csv(dir + "/profiles.csv", result.corpus.profiles, header_comment);

    {
        std::FILE* f = std::fopen((dir + "/top20_clubs.txt").c_str(), "wb");
        if (!f) raise("FileNotFound", "cannot write " + dir + "/top20_clubs.txt");
        for (const auto& club : result.top20_clubs) std::fprintf(f, "%s\n", club.c_str());
        std::fclose(f);
    }
    {
        csv::Writer w(dir + "/league_tiers.csv");
        if (!header_comment.empty()) w.comment(header_comment);
        w.row({"league_id", "tier"});
        for (const auto& [league, tier] : result.league_tiers) w.row({league, std::to_string(tier)});
    }
    {
        csv::Writer w(dir + "/position_aliases.csv");
        if (!header_comment.empty()) w.comment(header_comment);
        w.row({"label", "code"});
        for (const auto& [label, code] : schema::builtin_aliases().entries) w.row({label, code});
    }
    {
        nlohmann::ordered_json j;
        j["var_signal"] = result.var_signal;
        j["noise_sd_used"] = result.noise_sd_used;
        j["signal_fraction"] = result.signal_fraction;
        std::FILE* f = std::fopen((dir + "/synth_truth.json").c_str(), "wb");
        if (!f) raise("FileNotFound", "cannot write " + dir + "/synth_truth.json");
        const auto text = j.dump(2);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fputc('\n', f);
        std::fclose(f);
    }
}

SynthSpec read_synth_spec(const std::string& path) {
    const auto kv = kv::read_kv_file(path);
    SynthSpec spec;
    spec.n_players = static_cast<std::size_t>(kv.integer_or("n_players", static_cast<long long>(spec.n_players)));
    spec.n_leagues = static_cast<int>(kv.integer_or("n_leagues", spec.n_leagues));
    spec.seed = static_cast<std::uint64_t>(kv.integer_or("seed", 1));
    spec.noise_sd = kv.number_or("noise_sd", spec.noise_sd);
    if (kv.has("target_signal_fraction")) spec.target_signal_fraction = kv.number("target_signal_fraction");
    spec.intercept = kv.number_or("intercept", spec.intercept);
    spec.league_offset_sd = kv.number_or("league_offset_sd", spec.league_offset_sd);
    spec.second_division_fraction = kv.number_or("second_division_fraction", spec.second_division_fraction);
    spec.young_fraction = kv.number_or("young_fraction", spec.young_fraction);
    spec.missing_height_fraction = kv.number_or("missing_height_fraction", spec.missing_height_fraction);
    spec.min_matches = static_cast<int>(kv.integer_or("min_matches", spec.min_matches));
    spec.max_matches = static_cast<int>(kv.integer_or("max_matches", spec.max_matches));
    spec.window.horizon_days = static_cast<int>(kv.integer_or("horizon_days", spec.window.horizon_days));
    spec.window.window_length_days = static_cast<int>(kv.integer_or("window_days", spec.window.window_length_days));
    if (kv.has("position_pool")) spec.position_pool = kv::split_list(kv.get("position_pool"));
    for (const auto& [key, value] : kv.values) {
        if (key.rfind("coef.", 0) == 0)
            spec.true_coefficients[key.substr(5)] = kv.number(key);
    }
    return spec;
}

} // namespace playerval::synth
