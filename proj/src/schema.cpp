#include "playerval/schema.hpp"

#include "playerval/error.hpp"

#include <unordered_map>

namespace playerval::schema {

namespace {

std::vector<std::string> make_stat_names() {
    return {
        // part I
        "total_matches",
        "total_minutes_on_field",
        "total_goals",
        "total_assists",
        "total_shots",
        "total_head_shots",
        "total_yellow_cards",
        "total_red_cards",
        "total_direct_red_cards",
        "total_penalties",
        "total_linkup_plays",
        "total_duels",
        "total_duels_won",
        "total_defensive_duels",
        "total_defensive_duels_won",
        "total_offensive_duels",
        "total_offensive_duels_won",
        "total_aerial_duels",
        "total_aerial_duels_won",
        "total_fouls",
        "total_passes",
        "total_successful_passes",
        "total_smart_passes",
        "total_successful_smart_passes",
        "total_passes_to_final_third",
        "total_successful_passes_to_final_third",
        "total_crosses",
        "total_successful_crosses",
        "total_forward_passes",
        "total_successful_forward_passes",
        "total_back_passes",
        "total_successful_back_passes",
        "total_through_passes",
        "total_successful_through_passes",
        "total_key_passes",
        "total_successful_key_passes",
        "total_vertical_passes",
        "total_successful_vertical_passes",
        "total_long_passes",
        "total_successful_long_passes",
        // part II
        "total_dribbles",
        "total_successful_dribbles",
        "total_interceptions",
        "total_defensive_actions",
        "total_successful_defensive_actions",
        "total_attacking_actions",
        "total_successful_attacking_actions",
        "total_free_kicks",
        "total_free_kicks_on_target",
        "total_direct_free_kicks",
        "total_direct_free_kicks_on_target",
        "total_corners",
        "total_successful_penalties",
        "total_successful_linkup_plays",
        "total_accelerations",
        "total_pressing_duels",
        "total_pressing_duels_won",
        "total_loose_ball_duels",
        "total_loose_ball_duels_won",
        "total_missed_balls",
        "total_shot_assists",
        "total_shot_on_target_assists",
        "total_recoveries",
        "total_opponent_half_recoveries",
        "total_dangerous_opponent_half_recoveries",
        "total_losses",
        "total_own_half_losses",
        "total_dangerous_own_half_losses",
        "total_xg_shot",
        "total_xg_assist",
        "total_xg_save",
        "total_received_pass",
        "total_touch_in_box",
        "total_progressive_run",
        "total_offsides",
        "total_clearances",
        "total_second_assists",
        "total_third_assists",
        "total_shots_blocked",
        "total_fouls_suffered",
        "total_progressive_passes",
        "total_counterpressing_recoveries",
        "total_sliding_tackles",
        "total_goal_kicks",
        "total_dribbles_against",
        // part III
        "total_dribbles_against_won",
        "total_goal_kicks_short",
        "total_goal_kicks_long",
        "total_shots_on_target",
        "total_successful_progressive_passes",
        "total_successful_sliding_tackles",
        "total_successful_goal_kicks",
        "total_field_aerial_duels",
        "total_field_aerial_duels_won",
        "total_gk_clean_sheets",
        "total_gk_conceded_goals",
        "total_gk_shots_against",
        "total_gk_exits",
        "total_gk_successful_exits",
        "total_gk_aerial_duels",
        "total_gk_aerial_duels_won",
        "total_gk_saves",
        "total_new_duels_won",
        "total_new_defensive_duels_won",
        "total_new_offensive_duels_won",
        "total_new_successful_dribbles",
        "total_lateral_passes",
        "total_successful_lateral_passes",
    };
}

std::size_t idx(std::string_view name) {
    auto id = stat_index(name);
    if (!id) raise("UnknownColumn", "schema bug: unknown stat '" + std::string(name) + "'");
    return *id;
}

std::vector<StatPair> make_capped_pairs() {
    static const std::pair<const char*, const char*> pairs[] = {
        {"total_successful_passes", "total_passes"},
        {"total_successful_smart_passes", "total_smart_passes"},
        {"total_successful_passes_to_final_third", "total_passes_to_final_third"},
        {"total_successful_crosses", "total_crosses"},
        {"total_successful_forward_passes", "total_forward_passes"},
        {"total_successful_back_passes", "total_back_passes"},
        {"total_successful_through_passes", "total_through_passes"},
        {"total_successful_key_passes", "total_key_passes"},
        {"total_successful_vertical_passes", "total_vertical_passes"},
        {"total_successful_long_passes", "total_long_passes"},
        {"total_successful_dribbles", "total_dribbles"},
        {"total_successful_defensive_actions", "total_defensive_actions"},
        {"total_successful_attacking_actions", "total_attacking_actions"},
        {"total_successful_penalties", "total_penalties"},
        {"total_successful_linkup_plays", "total_linkup_plays"},
        {"total_successful_progressive_passes", "total_progressive_passes"},
        {"total_successful_sliding_tackles", "total_sliding_tackles"},
        {"total_successful_goal_kicks", "total_goal_kicks"},
        {"total_successful_lateral_passes", "total_lateral_passes"},
        {"total_duels_won", "total_duels"},
        {"total_defensive_duels_won", "total_defensive_duels"},
        {"total_offensive_duels_won", "total_offensive_duels"},
        {"total_aerial_duels_won", "total_aerial_duels"},
        {"total_pressing_duels_won", "total_pressing_duels"},
        {"total_loose_ball_duels_won", "total_loose_ball_duels"},
        {"total_field_aerial_duels_won", "total_field_aerial_duels"},
        {"total_gk_aerial_duels_won", "total_gk_aerial_duels"},
        {"total_dribbles_against_won", "total_dribbles_against"},
        {"total_free_kicks_on_target", "total_free_kicks"},
        {"total_direct_free_kicks_on_target", "total_direct_free_kicks"},
        {"total_shots_on_target", "total_shots"},
        {"total_gk_successful_exits", "total_gk_exits"},
        {"total_opponent_half_recoveries", "total_recoveries"},
        {"total_dangerous_opponent_half_recoveries", "total_opponent_half_recoveries"},
        {"total_own_half_losses", "total_losses"},
        {"total_dangerous_own_half_losses", "total_own_half_losses"},
    };
    std::vector<StatPair> out;
    out.reserve(std::size(pairs));
    for (const auto& [s, a] : pairs) out.push_back({idx(s), idx(a)});
    return out;
}

std::vector<RatioDef> make_ratio_defs() {
    // ratio name, numerator stat, denominator stat. "total_actions" in the
    // definition table is the combined defensive+attacking actions count.
    struct Row {
        const char* name;
        const char* num;
        const char* den;
    };
    static const Row rows[] = {
        {"ratio_minutes", "total_minutes_on_field", "total_matches"},
        {"ratio_goals_shots", "total_goals", "total_shots"},
        {"ratio_xg_shots", "total_xg_shot", "total_shots"},
        {"ratio_goals_xg", "total_goals", "total_xg_shot"},
        {"ratio_assists_xa", "total_xg_assist", "total_assists"},
        {"ratio_duels_won", "total_duels_won", "total_duels"},
        {"ratio_def_duels_won", "total_defensive_duels_won", "total_defensive_duels"},
        {"ratio_off_duels_won", "total_offensive_duels_won", "total_offensive_duels"},
        {"ratio_air_duels_won", "total_aerial_duels_won", "total_aerial_duels"},
        {"ratio_passes", "total_successful_passes", "total_passes"},
        {"ratio_smart_passes", "total_successful_smart_passes", "total_smart_passes"},
        {"ratio_third_passes", "total_successful_passes_to_final_third", "total_passes_to_final_third"},
        {"ratio_crosses", "total_successful_crosses", "total_crosses"},
        {"ratio_for_passes", "total_successful_forward_passes", "total_forward_passes"},
        {"ratio_back_passes", "total_successful_back_passes", "total_back_passes"},
        {"ratio_through_passes", "total_successful_through_passes", "total_through_passes"},
        {"ratio_key_passes", "total_successful_key_passes", "total_key_passes"},
        {"ratio_vert_passes", "total_successful_vertical_passes", "total_vertical_passes"},
        {"ratio_long_passes", "total_successful_long_passes", "total_long_passes"},
        {"ratio_dribbles", "total_successful_dribbles", "total_dribbles"},
        {"ratio_def_actions", "total_defensive_actions", nullptr},
        {"ratio_att_actions", "total_attacking_actions", nullptr},
        {"ratio_penalties", "total_successful_penalties", "total_penalties"},
        {"ratio_linup_plays", "total_successful_linkup_plays", "total_linkup_plays"},
        {"ratio_pressing_duels", "total_pressing_duels_won", "total_pressing_duels"},
        {"ratio_loose_ball", "total_loose_ball_duels_won", "total_loose_ball_duels"},
        {"ratio_opp_recoveries", "total_opponent_half_recoveries", "total_recoveries"},
        {"ratio_dang_recoveries", "total_dangerous_opponent_half_recoveries", "total_opponent_half_recoveries"},
        {"ratio_own_losses", "total_own_half_losses", "total_losses"},
        {"ratio_dang_losses", "total_dangerous_own_half_losses", "total_own_half_losses"},
        {"ratio_dribbles_against", "total_dribbles_against_won", "total_dribbles_against"},
        {"ratio_field_aerial_duels", "total_field_aerial_duels_won", "total_field_aerial_duels"},
        {"ratio_save_xs", "total_gk_saves", "total_xg_save"},
        {"ratio_succ_exit", "total_gk_successful_exits", "total_gk_exits"},
        {"ratio_gk_air_duels", "total_gk_aerial_duels_won", "total_gk_aerial_duels"},
        {"ratio_lat_passes", "total_successful_lateral_passes", "total_lateral_passes"},
        {"ratio_clean_game", "total_gk_clean_sheets", "total_matches"},
    };
    std::vector<RatioDef> out;
    out.reserve(std::size(rows));
    for (const auto& r : rows)
        out.push_back({r.name, idx(r.num), r.den ? idx(r.den) : kActionsTotal});
    return out;
}

} // namespace

const std::vector<std::string>& stat_names() {
    static const std::vector<std::string> names = make_stat_names();
    return names;
}

std::size_t stat_count() { return stat_names().size(); }

std::optional<std::size_t> stat_index(std::string_view name) {
    static const std::unordered_map<std::string_view, std::size_t> index = [] {
        std::unordered_map<std::string_view, std::size_t> m;
        const auto& names = stat_names();
        for (std::size_t i = 0; i < names.size(); ++i) m.emplace(names[i], i);
        return m;
    }();
    auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

const std::vector<StatPair>& capped_pairs() {
    static const std::vector<StatPair> pairs = make_capped_pairs();
    return pairs;
}

const std::vector<RatioDef>& ratio_defs() {
    static const std::vector<RatioDef> defs = make_ratio_defs();
    return defs;
}

bool is_position_code(std::string_view code) {
    for (auto c : kPositionCodes)
        if (c == code) return true;
    return false;
}

PositionAliases builtin_aliases() {
    PositionAliases a;
    a.entries = {
        {"Goalkeeper", "GK"},
        {"Left Back", "FB"},
        {"Right Back", "FB"},
        {"Central Back", "CD"},
        {"Centre-Back", "CD"},
        {"Sweeper", "CD"},
        {"Defensive Midfielder", "CDM"},
        {"Central Midfielder", "MD"},
        {"Right Midfielder", "MD"},
        {"Left Midfielder", "MD"},
        {"Attacking Midfielder", "AM"},
        {"Left Winger", "WG"},
        {"Right Winger", "WG"},
        {"Centre-Forward", "FWD"},
    };
    // bare codes are accepted as labels too (synthetic corpora use them)
    for (const auto code : kPositionCodes) a.entries.emplace_back(std::string(code), std::string(code));
    return a;
}

const WellKnown& well_known() {
    static const WellKnown wk = {
        idx("total_matches"), idx("total_minutes_on_field"), idx("total_goals"),
        idx("total_assists"), idx("total_shots"),
    };
    return wk;
}

} // namespace playerval::schema
