#include "playerval/ranking.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"
#include "playerval/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace playerval::ranking {

namespace {

using ordered_json = nlohmann::ordered_json;

// Discordant pairs = inversions of b's items scored by their rank in a.
std::size_t count_inversions(std::vector<std::size_t>& v) {
    std::vector<std::size_t> scratch(v.size());
    std::size_t inversions = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo + width < v.size(); lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[i] <= v[j]) {
                    scratch[k++] = v[i++];
                } else {
                    inversions += mid - i;
                    scratch[k++] = v[j++];
                }
            }
            while (i < mid) scratch[k++] = v[i++];
            while (j < hi) scratch[k++] = v[j++];
            std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
                      scratch.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

RankingReport rank_from_predictions(const std::vector<double>& log_predictions,
                                    const features::FeatureTable& table,
                                    const std::map<PlayerId, std::string>& names) {
    std::vector<std::size_t> order(log_predictions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (log_predictions[a] != log_predictions[b]) return log_predictions[a] > log_predictions[b];
        return table.player_ids[a] < table.player_ids[b];
    });
    RankingReport report;
    report.entries.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        RankedPlayer rp;
        rp.rank = static_cast<int>(i) + 1;
        rp.player_id = table.player_ids[order[i]];
        const auto it = names.find(rp.player_id);
        rp.name = it == names.end() ? "player " + std::to_string(rp.player_id) : it->second;
        rp.predicted_log_value = log_predictions[order[i]];
        rp.predicted_value = std::exp(log_predictions[order[i]]);
        report.entries.push_back(std::move(rp));
    }
    return report;
}

} // namespace

features::FeatureTable build_young_table(const ingest::Corpus& corpus,
                                         const std::set<std::string>& first_division_leagues,
                                         const std::set<std::string>& top20_clubs,
                                         const YoungTableOptions& opts) {
    const auto& layout = features::FeatureLayout::with_position_onehots();
    const features::LeagueValueIndex leagues(corpus);

    std::vector<PlayerId> players;
    for (const auto& [id, p] : corpus.profiles) players.push_back(id);

    struct Sample {
        bool kept = false;
        std::vector<double> row;
        double y = 0.0;
    };
    std::vector<Sample> samples(players.size());
    std::vector<std::exception_ptr> errors(players.size());

    parallel_for(players.size(), opts.n_threads, [&](std::size_t i) {
        try {
            const PlayerId id = players[i];
            const auto& profile = corpus.profiles.at(id);
            const Date turns_22 = add_years(profile.birth_date, 22);

            // Last first-division game strictly before the 22nd birthday.
            Date t{0};
            bool found = false;
            const auto lo = std::lower_bound(
                corpus.matches.begin(), corpus.matches.end(), id,
                [](const ingest::MatchRecord& m, PlayerId pid) { return m.player_id < pid; });
            for (auto it = lo; it != corpus.matches.end() && it->player_id == id; ++it) {
                if (!(it->match_date < turns_22)) continue;
                if (!first_division_leagues.count(it->league_id)) continue;
                if (!found || t < it->match_date) t = it->match_date;
                found = true;
            }
            if (!found) return;

            // Target: snapshot nearest t + horizon within the tolerance
            // (earlier date wins exact distance ties).
            const Date target = t.plus_days(opts.horizon_days);
            double value = 0.0;
            int best_dist = opts.value_match_tolerance_days + 1;
            const auto vlo = std::lower_bound(
                corpus.valuations.begin(), corpus.valuations.end(), id,
                [](const ingest::ValuationSnapshot& v, PlayerId pid) { return v.player_id < pid; });
            for (auto it = vlo; it != corpus.valuations.end() && it->player_id == id; ++it) {
                const int dist = std::abs(it->value_date - target);
                if (dist < best_dist) { // ascending dates: earlier wins ties
                    best_dist = dist;
                    value = it->market_value;
                }
            }
            if (best_dist > opts.value_match_tolerance_days) return;

            // Stats from the year ending at (and including) the last game.
            const auto agg = features::aggregate_interval(corpus, id, t.plus_days(-(opts.window_days - 1)),
                                                          t.plus_days(1), &first_division_leagues);
            auto row = features::assemble_row(layout, agg, profile, t, leagues, top20_clubs);
            for (std::size_t c = 0; c < schema::kPositionCodes.size(); ++c) {
                const std::string code(schema::kPositionCodes[c]);
                if (profile.position_codes.count(code))
                    row[layout.index_of("pos_" + code)] = 1.0;
            }
            samples[i].row = std::move(row);
            samples[i].y = features::checked_log_value(value, id);
            samples[i].kept = true;
        } catch (const Error& e) {
            if (e.name() != "NoPlayingTime") errors[i] = std::current_exception();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].kept) kept.push_back(i);
    if (kept.empty())
        raise("EmptyTable", "no player qualifies for the young-player dataset");

    const std::size_t league_col = layout.index_of("league_avg_value");
    double league_sum = 0.0;
    std::size_t league_count = 0;
    for (const auto i : kept) {
        if (!std::isnan(samples[i].row[league_col])) {
            league_sum += samples[i].row[league_col];
            ++league_count;
        }
    }
    const double league_mean = league_count ? league_sum / static_cast<double>(league_count) : 0.0;

    features::FeatureTable table;
    table.position_code = "ALL";
    table.columns = layout.columns;
    table.kinds = layout.kinds;
    table.X = Matrix(kept.size(), layout.columns.size());
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto& s = samples[kept[r]];
        std::copy(s.row.begin(), s.row.end(), table.X.row(r));
        if (!std::isnan(table.X.at(r, league_col))) table.X.at(r, league_col) -= league_mean;
        table.y.push_back(s.y);
        table.player_ids.push_back(players[kept[r]]);
    }
    features::impute_missing(table);
    return table;
}

RankingReport rank_players(const lasso::LassoModel& model, const features::FeatureTable& table,
                           const std::map<PlayerId, std::string>& names) {
    std::vector<double> preds(table.n());
    std::vector<double> row(table.d());
    for (std::size_t r = 0; r < table.n(); ++r) {
        row.assign(table.X.row(r), table.X.row(r) + table.d());
        preds[r] = lasso::predict(model, row);
    }
    return rank_from_predictions(preds, table, names);
}

RankingReport rank_players(const forest::ForestModel& model, const features::FeatureTable& table,
                           const std::map<PlayerId, std::string>& names) {
    std::vector<double> preds(table.n());
    std::vector<double> row(table.d());
    for (std::size_t r = 0; r < table.n(); ++r) {
        row.assign(table.X.row(r), table.X.row(r) + table.d());
        preds[r] = forest::predict(model, row);
    }
    return rank_from_predictions(preds, table, names);
}

double kendall_tau(const std::vector<PlayerId>& ranking_a, const std::vector<PlayerId>& ranking_b) {
    if (ranking_a.size() != ranking_b.size())
        raise("ItemSetMismatch", "rankings have different lengths");
    if (ranking_a.empty())
        raise("ItemSetMismatch", "rankings are empty");
    std::map<PlayerId, std::size_t> rank_in_a;
    for (std::size_t i = 0; i < ranking_a.size(); ++i)
        if (!rank_in_a.emplace(ranking_a[i], i).second)
            raise("ItemSetMismatch", "duplicate item in ranking");
    std::vector<std::size_t> sequence;
    sequence.reserve(ranking_b.size());
    for (const auto id : ranking_b) {
        const auto it = rank_in_a.find(id);
        if (it == rank_in_a.end())
            raise("ItemSetMismatch", "item " + std::to_string(id) + " missing from the other ranking");
        sequence.push_back(it->second);
    }
    const auto n = static_cast<double>(ranking_a.size());
    if (ranking_a.size() < 2) return 1.0;
    const double total = n * (n - 1.0) / 2.0;
    const auto discordant = static_cast<double>(count_inversions(sequence));
    return (total - 2.0 * discordant) / total;
}

double kendall_tau_on_top_k(const std::vector<PlayerId>& reference, const std::vector<PlayerId>& other,
                            std::size_t k) {
    if (k == 0 || k > reference.size()) k = reference.size();
    const std::set<PlayerId> keep(reference.begin(), reference.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<PlayerId> ref_k(reference.begin(), reference.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<PlayerId> other_k;
    for (const auto id : other)
        if (keep.count(id)) other_k.push_back(id);
    return kendall_tau(ref_k, other_k);
}

ReferenceRanking read_reference_ranking(const std::string& path) {
    auto table = csv::read_file(path);
    if (table.header != std::vector<std::string>{"rank", "player_id"})
        raise("UnknownColumn", path + ": header must be rank,player_id");
    std::vector<std::pair<long long, PlayerId>> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != 2) raise("MalformedRow", path + ": line " + std::to_string(line));
        rows.emplace_back(csv::parse_integer(row[0], line, "rank"), csv::parse_integer(row[1], line, "player_id"));
    }
    std::sort(rows.begin(), rows.end());
    ReferenceRanking out;
    for (const auto& [rank, id] : rows) out.players.push_back(id);
    return out;
}

void score_against_reference(RankingReport& report, const ReferenceRanking& reference, std::size_t top_k) {
    std::vector<PlayerId> ref = reference.players;
    if (top_k > 0 && top_k < ref.size()) ref.resize(top_k);

    std::set<PlayerId> predicted;
    for (const auto& e : report.entries) predicted.insert(e.player_id);

    std::vector<PlayerId> ref_common;
    std::set<PlayerId> common;
    for (const auto id : ref)
        if (predicted.count(id)) {
            ref_common.push_back(id);
            common.insert(id);
        }
    std::vector<PlayerId> pred_common;
    for (const auto& e : report.entries)
        if (common.count(e.player_id)) pred_common.push_back(e.player_id);

    report.has_reference = true;
    report.reference_common = ref_common.size();
    if (ref_common.size() < 2) {
        report.kendall_tau_vs_reference = 0.0;
        report.reference_note = "fewer than 2 common players; tau not meaningful";
        return;
    }
    report.kendall_tau_vs_reference = kendall_tau(ref_common, pred_common);
    report.reference_note = top_k > 0 ? "scored on the reference top " + std::to_string(top_k)
                                      : "scored on all common players";
}

void write_ranking_csv(const std::string& path, const RankingReport& report, const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    w.row({"rank", "player_id", "name", "predicted_value", "predicted_log_value"});
    for (const auto& e : report.entries)
        w.row({std::to_string(e.rank), std::to_string(e.player_id), e.name, csv::format_double(e.predicted_value),
               csv::format_double(e.predicted_log_value)});
}

std::string ranking_to_json(const RankingReport& report) {
    ordered_json j;
    ordered_json entries = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json row;
        row["rank"] = e.rank;
        row["player_id"] = e.player_id;
        row["name"] = e.name;
        row["predicted_value"] = e.predicted_value;
        row["predicted_log_value"] = e.predicted_log_value;
        entries.push_back(std::move(row));
    }
    j["ranking"] = std::move(entries);
    if (report.has_reference) {
        j["kendall_tau_vs_reference"] = report.kendall_tau_vs_reference;
        j["reference_common"] = report.reference_common;
        j["reference_note"] = report.reference_note;
    }
    return j.dump(2);
}

std::string ranking_to_text(const RankingReport& report, std::size_t top) {
    std::ostringstream out;
    out << "Rank  Predicted value  Name\n";
    std::size_t shown = 0;
    for (const auto& e : report.entries) {
        if (top > 0 && shown++ >= top) break;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%4d  %15.0f  ", e.rank, e.predicted_value);
        out << buf << e.name << "\n";
    }
    if (top > 0 && report.entries.size() > top)
        out << "  ... " << report.entries.size() - top << " more\n";
    if (report.has_reference) {
        out << "\nKendall tau vs reference: " << csv::format_double(report.kendall_tau_vs_reference) << " ("
            << report.reference_note << ", " << report.reference_common << " players)\n";
    }
    return out.str();
}

} // namespace playerval::ranking
