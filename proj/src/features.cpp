#include "playerval/features.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"
#include "playerval/parallel.hpp"
#include "playerval/stats_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace playerval::features {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct AugmentIndices {
    std::size_t age, age_sq, height, height_sq;
    std::size_t goals_sq, assists_sq, shots_sq;
    std::size_t is_top_20, league;
};

const AugmentIndices& augment_indices() {
    static const AugmentIndices idx = [] {
        const auto& layout = FeatureLayout::base();
        return AugmentIndices{
            layout.index_of("age"),
            layout.index_of("age_sq"),
            layout.index_of("height"),
            layout.index_of("height_sq"),
            layout.index_of("goals_per_min_sq"),
            layout.index_of("assists_per_min_sq"),
            layout.index_of("shots_per_min_sq"),
            layout.index_of("is_top_20"),
            layout.index_of("league_avg_value"),
        };
    }();
    return idx;
}

FeatureLayout make_base_layout() {
    FeatureLayout layout;
    for (const auto& s : schema::stat_names()) {
        layout.columns.push_back(s);
        layout.kinds.push_back(ColumnKind::Continuous);
    }
    for (const auto& r : schema::ratio_defs()) {
        layout.columns.push_back(r.name);
        layout.kinds.push_back(ColumnKind::Continuous);
    }
    const char* extras[] = {"age",       "age_sq",           "height",
                            "height_sq", "goals_per_min_sq", "assists_per_min_sq",
                            "shots_per_min_sq"};
    for (const auto* name : extras) {
        layout.columns.emplace_back(name);
        layout.kinds.push_back(ColumnKind::Continuous);
    }
    layout.columns.emplace_back("is_top_20");
    layout.kinds.push_back(ColumnKind::Boolean);
    layout.columns.emplace_back("league_avg_value");
    layout.kinds.push_back(ColumnKind::LeagueLog);
    return layout;
}

} // namespace

std::size_t FeatureLayout::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    raise("UnknownColumn", "no feature named '" + name + "'");
}

const FeatureLayout& FeatureLayout::base() {
    static const FeatureLayout layout = make_base_layout();
    return layout;
}

const FeatureLayout& FeatureLayout::with_position_onehots() {
    static const FeatureLayout layout = [] {
        FeatureLayout l = make_base_layout();
        for (const auto code : schema::kPositionCodes) {
            l.columns.push_back("pos_" + std::string(code));
            l.kinds.push_back(ColumnKind::Boolean);
        }
        return l;
    }();
    return layout;
}

WindowAggregate aggregate_interval(const Corpus& corpus, PlayerId player, Date from, Date to,
                                   const std::set<std::string>* leagues_allowed) {
    const auto& wk = schema::well_known();
    WindowAggregate agg;
    agg.sums.assign(schema::stat_count(), 0.0);

    // Matches are sorted by (player_id, date); walk this player's span.
    const auto lo = std::lower_bound(corpus.matches.begin(), corpus.matches.end(), player,
                                     [](const ingest::MatchRecord& m, PlayerId id) { return m.player_id < id; });
    for (auto it = lo; it != corpus.matches.end() && it->player_id == player; ++it) {
        if (it->match_date < from || !(it->match_date < to)) continue;
        if (leagues_allowed && !leagues_allowed->count(it->league_id)) continue;
        for (std::size_t s = 0; s < agg.sums.size(); ++s) agg.sums[s] += it->stats[s];
    }

    agg.minutes = agg.sums[wk.minutes];
    if (agg.minutes <= 0.0)
        raise("NoPlayingTime", "player " + std::to_string(player) + " has no minutes in [" +
                                   format_date(from) + ", " + format_date(to) + ")");

    agg.rates = agg.sums;
    for (std::size_t s = 0; s < agg.rates.size(); ++s) {
        if (s == wk.minutes || s == wk.matches) continue; // stay as window totals
        agg.rates[s] = agg.sums[s] / agg.minutes;
    }
    return agg;
}

WindowAggregate aggregate_window(const Corpus& corpus, PlayerId player, Date value_date,
                                 const WindowSpec& spec) {
    const Date from = value_date.plus_days(-(spec.horizon_days + spec.window_length_days));
    const Date to = value_date.plus_days(-spec.horizon_days);
    return aggregate_interval(corpus, player, from, to);
}

const std::vector<std::string>& ratio_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& r : schema::ratio_defs()) out.push_back(r.name);
        return out;
    }();
    return names;
}

std::vector<double> ratio_features(const std::vector<double>& window_sums) {
    const auto& defs = schema::ratio_defs();
    // "total_actions" is the combined defensive+attacking attempts count.
    const double actions = window_sums[schema::stat_index("total_defensive_actions").value()] +
                           window_sums[schema::stat_index("total_attacking_actions").value()];
    std::vector<double> out(defs.size(), 0.0);
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const double den = defs[i].denominator == schema::kActionsTotal ? actions : window_sums[defs[i].denominator];
        if (den != 0.0) out[i] = window_sums[defs[i].numerator] / den;
    }
    return out;
}

LeagueValueIndex::LeagueValueIndex(const Corpus& corpus) : corpus_(&corpus) {
    const auto& vals = corpus.valuations; // sorted by (player_id, date)
    std::size_t i = 0;
    while (i < vals.size()) {
        std::size_t j = i;
        while (j < vals.size() && vals[j].player_id == vals[i].player_id) ++j;
        value_spans_[vals[i].player_id] = {i, j};
        i = j;
    }
    for (const auto& [id, profile] : corpus.profiles)
        league_members_[profile.league_id].push_back(id);
}

std::optional<double> LeagueValueIndex::latest_value(PlayerId player, Date on_or_before) const {
    const auto it = value_spans_.find(player);
    if (it == value_spans_.end()) return std::nullopt;
    const auto& vals = corpus_->valuations;
    std::optional<double> best;
    for (std::size_t i = it->second.begin; i < it->second.end; ++i) {
        if (vals[i].value_date <= on_or_before) best = vals[i].market_value;
        else break;
    }
    return best;
}

Date LeagueValueIndex::last_value_date(PlayerId player) const {
    const auto it = value_spans_.find(player);
    if (it == value_spans_.end() || it->second.begin == it->second.end)
        raise("EmptyTable", "player " + std::to_string(player) + " has no valuations");
    return corpus_->valuations[it->second.end - 1].value_date;
}

std::optional<double> LeagueValueIndex::league_log_avg(const std::string& league_id, Date t) const {
    const auto it = league_members_.find(league_id);
    if (it == league_members_.end()) return std::nullopt;
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto member : it->second) {
        if (const auto v = latest_value(member, t)) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return std::log(sum / static_cast<double>(count));
}

void augment_features(std::vector<double>& row, const WindowAggregate& agg,
                      const ingest::PlayerProfile& profile, Date t, const LeagueValueIndex& leagues,
                      const std::set<std::string>& top20_clubs) {
    const auto& ai = augment_indices();
    const auto& wk = schema::well_known();

    const double age = age_years(profile.birth_date, t);
    row[ai.age] = age;
    row[ai.age_sq] = age * age;

    if (profile.height_cm > 0.0) {
        row[ai.height] = profile.height_cm;
        row[ai.height_sq] = profile.height_cm * profile.height_cm;
    } else {
        row[ai.height] = kNaN;
        row[ai.height_sq] = kNaN;
    }

    const double goals_rate = agg.rates[wk.goals];
    const double assists_rate = agg.rates[wk.assists];
    const double shots_rate = agg.rates[wk.shots];
    row[ai.goals_sq] = goals_rate * goals_rate;
    row[ai.assists_sq] = assists_rate * assists_rate;
    row[ai.shots_sq] = shots_rate * shots_rate;

    row[ai.is_top_20] = !profile.youth_club.empty() && top20_clubs.count(profile.youth_club) ? 1.0 : 0.0;

    const auto league = leagues.league_log_avg(profile.league_id, t);
    row[ai.league] = league ? *league : kNaN; // centered later by the table builder
}

std::vector<double> assemble_row(const FeatureLayout& layout, const WindowAggregate& agg,
                                 const ingest::PlayerProfile& profile, Date t,
                                 const LeagueValueIndex& leagues, const std::set<std::string>& top20_clubs) {
    std::vector<double> row(layout.columns.size(), 0.0);
    const std::size_t n_stats = schema::stat_count();
    for (std::size_t s = 0; s < n_stats; ++s) row[s] = agg.rates[s];
    const auto ratios = ratio_features(agg.sums);
    for (std::size_t r = 0; r < ratios.size(); ++r) row[n_stats + r] = ratios[r];
    augment_features(row, agg, profile, t, leagues, top20_clubs);
    return row;
}

// Log targets of realistic currency values land in (0, 25); anything outside
// is corrupt input, not a sample.
double checked_log_value(double market_value, PlayerId player) {
    const double y = std::log(market_value);
    if (!(y > 0.0 && y < 25.0))
        raise("ValueOutOfRange", "player " + std::to_string(player) + ": log market value " +
                                     std::to_string(y) + " outside (0, 25)");
    return y;
}

std::map<std::string, FeatureTable> build_position_tables(const Corpus& corpus, const WindowSpec& spec,
                                                          const std::set<std::string>& top20_clubs,
                                                          const BuildOptions& opts) {
    const auto& layout = FeatureLayout::base();
    const LeagueValueIndex leagues(corpus);

    std::vector<PlayerId> players;
    players.reserve(corpus.profiles.size());
    for (const auto& [id, p] : corpus.profiles) players.push_back(id);

    struct Sample {
        bool kept = false;
        std::vector<double> row;
        double y = 0.0;
    };
    std::vector<Sample> samples(players.size());
    std::vector<std::exception_ptr> errors(players.size());

    // Per-player aggregation is independent; rows land by index. Exceptions
    // may not escape an OpenMP region, so they are parked and rethrown.
    parallel_for(players.size(), opts.n_threads, [&](std::size_t i) {
        try {
            const PlayerId id = players[i];
            const auto& profile = corpus.profiles.at(id);
            const Date t = leagues.last_value_date(id);
            const auto agg = aggregate_window(corpus, id, t, spec);
            samples[i].row = assemble_row(layout, agg, profile, t, leagues, top20_clubs);
            samples[i].y = checked_log_value(leagues.latest_value(id, t).value(), id);
            samples[i].kept = true;
        } catch (const Error& e) {
            if (e.name() != "NoPlayingTime") // drop only the declared case
                errors[i] = std::current_exception();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    // Center the league column on its corpus-wide mean (one term per player).
    const std::size_t league_col = augment_indices().league;
    double league_sum = 0.0;
    std::size_t league_count = 0;
    for (const auto& s : samples) {
        if (s.kept && !std::isnan(s.row[league_col])) {
            league_sum += s.row[league_col];
            ++league_count;
        }
    }
    const double league_mean = league_count ? league_sum / static_cast<double>(league_count) : 0.0;

    std::map<std::string, std::vector<std::size_t>> rows_per_position;
    for (std::size_t i = 0; i < players.size(); ++i) {
        const auto& profile = corpus.profiles.at(players[i]);
        for (const auto& code : profile.position_codes) {
            auto& rows = rows_per_position[code];
            if (samples[i].kept) rows.push_back(i);
        }
    }

    std::map<std::string, FeatureTable> tables;
    for (auto& [code, row_ids] : rows_per_position) {
        if (row_ids.empty())
            raise("EmptyTable", "position " + code + " ended with 0 rows");
        FeatureTable table;
        table.position_code = code;
        table.columns = layout.columns;
        table.kinds = layout.kinds;
        table.X = Matrix(row_ids.size(), layout.columns.size());
        table.y.reserve(row_ids.size());
        for (std::size_t r = 0; r < row_ids.size(); ++r) {
            const auto& s = samples[row_ids[r]];
            std::copy(s.row.begin(), s.row.end(), table.X.row(r));
            if (!std::isnan(table.X.at(r, league_col))) table.X.at(r, league_col) -= league_mean;
            table.y.push_back(s.y);
            table.player_ids.push_back(players[row_ids[r]]);
        }
        impute_missing(table);
        tables.emplace(code, std::move(table));
    }
    if (tables.empty())
        raise("EmptyTable", "no position dataset could be built");
    return tables;
}

std::vector<std::string> impute_missing(FeatureTable& table) {
    std::vector<std::string> imputed;
    for (std::size_t c = 0; c < table.d(); ++c) {
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t r = 0; r < table.n(); ++r) {
            const double v = table.X.at(r, c);
            if (!std::isnan(v)) {
                sum += v;
                ++present;
            }
        }
        if (present == table.n()) continue;
        const double fill = present ? sum / static_cast<double>(present) : 0.0;
        for (std::size_t r = 0; r < table.n(); ++r)
            if (std::isnan(table.X.at(r, c))) table.X.at(r, c) = fill;
        imputed.push_back(table.columns[c]);
    }
    return imputed;
}

std::vector<double> apply_norm_stats(const std::vector<double>& raw_row,
                                     const std::vector<NormStat>& stats,
                                     const std::vector<ColumnKind>& kinds) {
    if (raw_row.size() != stats.size() || stats.size() != kinds.size())
        raise("DimensionMismatch", "row width does not match normalization statistics");
    std::vector<double> out(raw_row.size());
    for (std::size_t c = 0; c < raw_row.size(); ++c) {
        switch (kinds[c]) {
        case ColumnKind::Continuous:
            out[c] = stats[c].degenerate ? 0.0 : (raw_row[c] - stats[c].mean) / stats[c].scale;
            break;
        case ColumnKind::LeagueLog:
            out[c] = raw_row[c] - stats[c].mean;
            break;
        case ColumnKind::Boolean:
            out[c] = raw_row[c];
            break;
        }
    }
    return out;
}

Matrix apply_norm_stats(const Matrix& raw, const std::vector<NormStat>& stats,
                        const std::vector<ColumnKind>& kinds) {
    Matrix out(raw.rows, raw.cols);
    std::vector<double> row(raw.cols);
    for (std::size_t r = 0; r < raw.rows; ++r) {
        row.assign(raw.row(r), raw.row(r) + raw.cols);
        const auto transformed = apply_norm_stats(row, stats, kinds);
        std::copy(transformed.begin(), transformed.end(), out.row(r));
    }
    return out;
}

FeatureTable normalize(const FeatureTable& raw) {
    if (raw.n() < 2)
        raise("TooFewSamples", "normalization needs at least 2 rows, got " + std::to_string(raw.n()));
    FeatureTable out = raw;
    out.norm_stats.assign(raw.d(), NormStat{});
    for (std::size_t c = 0; c < raw.d(); ++c) {
        auto& ns = out.norm_stats[c];
        switch (raw.kinds[c]) {
        case ColumnKind::Continuous: {
            double sum = 0.0, max = -std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < raw.n(); ++r) {
                const double v = raw.X.at(r, c);
                if (!std::isfinite(v)) raise("NonFiniteInput", "column '" + raw.columns[c] + "' has a non-finite cell");
                sum += v;
                max = std::max(max, v);
            }
            ns.mean = sum / static_cast<double>(raw.n());
            if (max == 0.0) {
                ns.degenerate = true;
                ns.scale = 0.0;
            } else {
                ns.scale = max;
            }
            break;
        }
        case ColumnKind::LeagueLog: {
            double sum = 0.0;
            for (std::size_t r = 0; r < raw.n(); ++r) sum += raw.X.at(r, c);
            ns.mean = sum / static_cast<double>(raw.n());
            ns.scale = 1.0;
            break;
        }
        case ColumnKind::Boolean:
            ns.mean = 0.0;
            ns.scale = 1.0;
            break;
        }
    }
    out.X = apply_norm_stats(raw.X, out.norm_stats, out.kinds);
    return out;
}

FeatureTable drop_column(const FeatureTable& table, const std::string& name) {
    const auto idx = table.column_index(name);
    if (!idx) raise("UnknownColumn", "no column '" + name + "' to drop");
    FeatureTable out;
    out.position_code = table.position_code;
    out.y = table.y;
    out.player_ids = table.player_ids;
    for (std::size_t c = 0; c < table.d(); ++c) {
        if (c == *idx) continue;
        out.columns.push_back(table.columns[c]);
        out.kinds.push_back(table.kinds[c]);
        if (!table.norm_stats.empty()) out.norm_stats.push_back(table.norm_stats[c]);
    }
    out.X = Matrix(table.n(), table.d() - 1);
    for (std::size_t r = 0; r < table.n(); ++r) {
        std::size_t w = 0;
        for (std::size_t c = 0; c < table.d(); ++c) {
            if (c == *idx) continue;
            out.X.at(r, w++) = table.X.at(r, c);
        }
    }
    return out;
}

void write_feature_csv(const std::string& path, const FeatureTable& table, const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    std::vector<std::string> header = table.columns;
    header.emplace_back("y");
    header.emplace_back("player_id");
    w.row(header);
    std::vector<std::string> row(header.size());
    for (std::size_t r = 0; r < table.n(); ++r) {
        for (std::size_t c = 0; c < table.d(); ++c) row[c] = csv::format_double(table.X.at(r, c));
        row[table.d()] = csv::format_double(table.y[r]);
        row[table.d() + 1] = std::to_string(table.player_ids[r]);
        w.row(row);
    }
}

} // namespace playerval::features
