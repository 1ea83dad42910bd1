#include "playerval/ingest.hpp"

#include "playerval/csv.hpp"
#include "playerval/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace playerval::ingest {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_stat_invariants(const MatchRecord& rec, std::size_t line) {
    const auto& wk = schema::well_known();
    const auto fail = [&](const std::string& msg) {
        raise("MalformedRow", "line " + std::to_string(line) + ": " + msg);
    };
    for (std::size_t i = 0; i < rec.stats.size(); ++i) {
        const double v = rec.stats[i];
        if (!std::isfinite(v) || v < 0.0)
            fail("stat '" + schema::stat_names()[i] + "' must be a non-negative finite number");
    }
    const double played = rec.stat(wk.matches);
    if (played != 0.0 && played != 1.0) fail("total_matches must be 0 or 1");
    const double minutes = rec.stat(wk.minutes);
    if (minutes > 130.0) fail("total_minutes_on_field must lie in [0, 130]");
    for (const auto& pair : schema::capped_pairs()) {
        if (rec.stat(pair.success) > rec.stat(pair.attempt))
            fail("'" + schema::stat_names()[pair.success] + "' exceeds '" +
                 schema::stat_names()[pair.attempt] + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

std::vector<MatchRecord> parse_matches_text(const std::string& text, const std::string& origin) {
    auto table = csv::parse(text, origin);
    if (table.header.size() < 3 || table.header[0] != "player_id" ||
        table.header[1] != "match_date" || table.header[2] != "league_id")
        raise("UnknownColumn", origin + ": header must start with player_id,match_date,league_id");

    // Map each remaining header column to its schema stat id.
    std::vector<std::size_t> stat_of_column(table.header.size());
    std::unordered_set<std::size_t> seen;
    for (std::size_t c = 3; c < table.header.size(); ++c) {
        const auto id = schema::stat_index(table.header[c]);
        if (!id)
            raise("UnknownColumn", origin + ": '" + table.header[c] + "' is not a glossary statistic");
        if (!seen.insert(*id).second)
            raise("UnknownColumn", origin + ": duplicate column '" + table.header[c] + "'");
        stat_of_column[c] = *id;
    }

    std::vector<MatchRecord> out;
    out.reserve(table.rows.size());
    std::set<std::pair<PlayerId, std::int32_t>> keys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != table.header.size())
            raise("MalformedRow", origin + ": line " + std::to_string(line) + ": expected " +
                                      std::to_string(table.header.size()) + " cells, got " +
                                      std::to_string(row.size()));
        MatchRecord rec;
        rec.player_id = csv::parse_integer(row[0], line, "player_id");
        rec.match_date = parse_date(row[1]);
        rec.league_id = row[2];
        rec.stats.assign(schema::stat_count(), 0.0);
        for (std::size_t c = 3; c < row.size(); ++c) {
            if (row[c].empty()) continue; // missing cell -> 0
            rec.stats[stat_of_column[c]] = csv::parse_number(row[c], line, table.header[c]);
        }
        check_stat_invariants(rec, line);
        if (!keys.emplace(rec.player_id, rec.match_date.days).second)
            raise("DuplicateKey", origin + ": line " + std::to_string(line) + ": repeated (player_id, match_date) = (" +
                                      std::to_string(rec.player_id) + ", " + format_date(rec.match_date) + ")");
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<MatchRecord> parse_matches(const std::string& path) {
    return parse_matches_text(slurp(path), path);
}

std::vector<ValuationSnapshot> parse_valuations_text(const std::string& text, const std::string& origin) {
    auto table = csv::parse(text, origin);
    if (table.header != std::vector<std::string>{"player_id", "value_date", "market_value"})
        raise("UnknownColumn", origin + ": header must be player_id,value_date,market_value");
    std::vector<ValuationSnapshot> out;
    out.reserve(table.rows.size());
    std::set<std::pair<PlayerId, std::int32_t>> keys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != 3)
            raise("MalformedRow", origin + ": line " + std::to_string(line) + ": expected 3 cells");
        ValuationSnapshot snap;
        snap.player_id = csv::parse_integer(row[0], line, "player_id");
        snap.value_date = parse_date(row[1]);
        snap.market_value = csv::parse_number(row[2], line, "market_value");
        if (!(snap.market_value > 0.0) || !std::isfinite(snap.market_value))
            raise("NonPositiveValue", origin + ": line " + std::to_string(line) + ": market_value must be > 0");
        if (!keys.emplace(snap.player_id, snap.value_date.days).second)
            raise("DuplicateKey", origin + ": line " + std::to_string(line) + ": repeated (player_id, value_date)");
        out.push_back(snap);
    }
    return out;
}

std::vector<ValuationSnapshot> parse_valuations(const std::string& path) {
    return parse_valuations_text(slurp(path), path);
}

std::map<PlayerId, PlayerProfile> parse_profiles_text(const std::string& text, const std::string& origin,
                                                      const schema::PositionAliases& aliases) {
    auto table = csv::parse(text, origin);
    const std::vector<std::string> expected = {"player_id", "name",       "birth_date", "positions",
                                               "league_id", "youth_club", "height_cm"};
    if (table.header != expected)
        raise("UnknownColumn", origin + ": header must be player_id,name,birth_date,positions,league_id,youth_club,height_cm");

    std::map<PlayerId, PlayerProfile> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != expected.size())
            raise("MalformedRow", origin + ": line " + std::to_string(line) + ": expected " +
                                      std::to_string(expected.size()) + " cells");
        PlayerProfile p;
        p.player_id = csv::parse_integer(row[0], line, "player_id");
        p.name = row[1];
        if (row[2].empty())
            raise("MissingBirthDate", origin + ": line " + std::to_string(line) + ": player " +
                                          std::to_string(p.player_id) + " has no birth date");
        p.birth_date = parse_date(row[2]);
        for (const auto& label : split(row[3], ';')) {
            if (label.empty()) continue;
            const auto code = aliases.code_for(label);
            if (!code)
                raise("UnknownPosition", origin + ": line " + std::to_string(line) + ": position label '" +
                                             label + "' is not in the alias table");
            p.positions.insert(label);
            p.position_codes.insert(*code);
        }
        if (p.positions.empty())
            raise("UnknownPosition", origin + ": line " + std::to_string(line) + ": empty positions cell");
        p.league_id = row[4];
        p.youth_club = row[5];
        p.height_cm = row[6].empty() ? 0.0 : csv::parse_number(row[6], line, "height_cm");
        if (p.height_cm < 0.0)
            raise("MalformedRow", origin + ": line " + std::to_string(line) + ": negative height");
        if (!out.emplace(p.player_id, std::move(p)).second)
            raise("DuplicateKey", origin + ": line " + std::to_string(line) + ": repeated player_id");
    }
    return out;
}

std::map<PlayerId, PlayerProfile> parse_profiles(const std::string& path,
                                                 const schema::PositionAliases& aliases) {
    return parse_profiles_text(slurp(path), path, aliases);
}

JoinResult join_corpus(std::vector<MatchRecord> matches,
                       std::vector<ValuationSnapshot> valuations,
                       std::map<PlayerId, PlayerProfile> profiles) {
    std::set<PlayerId> in_matches, in_values, in_profiles;
    for (const auto& m : matches) in_matches.insert(m.player_id);
    for (const auto& v : valuations) in_values.insert(v.player_id);
    for (const auto& [id, p] : profiles) in_profiles.insert(id);

    std::set<PlayerId> kept;
    for (const auto id : in_matches)
        if (in_values.count(id) && in_profiles.count(id)) kept.insert(id);
    if (kept.empty())
        raise("EmptyJoin", "no player appears in all three datasets");

    JoinResult result;
    auto& corpus = result.corpus;
    auto& report = result.report;
    report.players_kept = kept.size();
    report.match_players_dropped = in_matches.size() - kept.size();
    report.valuation_players_dropped = in_values.size() - kept.size();
    report.profile_players_dropped = in_profiles.size() - kept.size();

    for (auto& m : matches) {
        if (kept.count(m.player_id)) corpus.matches.push_back(std::move(m));
        else ++report.match_rows_dropped;
    }
    for (auto& v : valuations) {
        if (kept.count(v.player_id)) corpus.valuations.push_back(v);
        else ++report.valuation_rows_dropped;
    }
    for (auto& [id, p] : profiles)
        if (kept.count(id)) corpus.profiles.emplace(id, std::move(p));

    // Canonical order: parsing must be order-independent.
    std::sort(corpus.matches.begin(), corpus.matches.end(), [](const MatchRecord& a, const MatchRecord& b) {
        return std::tie(a.player_id, a.match_date.days) < std::tie(b.player_id, b.match_date.days);
    });
    std::sort(corpus.valuations.begin(), corpus.valuations.end(),
              [](const ValuationSnapshot& a, const ValuationSnapshot& b) {
                  return std::tie(a.player_id, a.value_date.days) < std::tie(b.player_id, b.value_date.days);
              });
    return result;
}

void write_matches_csv(const std::string& path, const std::vector<MatchRecord>& matches,
                       const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    std::vector<std::string> header = {"player_id", "match_date", "league_id"};
    for (const auto& s : schema::stat_names()) header.push_back(s);
    w.row(header);
    for (const auto& m : matches) {
        std::vector<std::string> row = {std::to_string(m.player_id), format_date(m.match_date), m.league_id};
        for (const double v : m.stats) row.push_back(csv::format_double(v));
        w.row(row);
    }
}

void write_valuations_csv(const std::string& path, const std::vector<ValuationSnapshot>& valuations,
                          const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    w.row({"player_id", "value_date", "market_value"});
    for (const auto& v : valuations)
        w.row({std::to_string(v.player_id), format_date(v.value_date), csv::format_double(v.market_value)});
}

void write_profiles_csv(const std::string& path, const std::map<PlayerId, PlayerProfile>& profiles,
                        const std::string& header_comment) {
    csv::Writer w(path);
    if (!header_comment.empty()) w.comment(header_comment);
    w.row({"player_id", "name", "birth_date", "positions", "league_id", "youth_club", "height_cm"});
    for (const auto& [id, p] : profiles) {
        std::string labels;
        for (const auto& label : p.positions) {
            if (!labels.empty()) labels.push_back(';');
            labels += label;
        }
        w.row({std::to_string(id), p.name, format_date(p.birth_date), labels, p.league_id, p.youth_club,
               p.height_cm > 0.0 ? csv::format_double(p.height_cm) : std::string{}});
    }
}

std::set<std::string> read_club_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise("FileNotFound", "cannot open '" + path + "'");
    std::set<std::string> clubs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        clubs.insert(line);
    }
    return clubs;
}

schema::PositionAliases read_position_aliases(const std::string& path) {
    auto table = csv::read_file(path);
    if (table.header != std::vector<std::string>{"label", "code"})
        raise("UnknownColumn", path + ": header must be label,code");
    schema::PositionAliases aliases;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != 2)
            raise("MalformedRow", path + ": line " + std::to_string(table.line_numbers[r]) + ": expected 2 cells");
        if (!schema::is_position_code(row[1]))
            raise("UnknownPosition", path + ": '" + row[1] + "' is not one of the 8 position codes");
        aliases.entries.emplace_back(row[0], row[1]);
    }
    return aliases;
}

std::map<std::string, int> read_league_tiers(const std::string& path) {
    auto table = csv::read_file(path);
    if (table.header != std::vector<std::string>{"league_id", "tier"})
        raise("UnknownColumn", path + ": header must be league_id,tier");
    std::map<std::string, int> tiers;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto line = table.line_numbers[r];
        if (row.size() != 2)
            raise("MalformedRow", path + ": line " + std::to_string(line) + ": expected 2 cells");
        tiers[row[0]] = static_cast<int>(csv::parse_integer(row[1], line, "tier"));
    }
    return tiers;
}

} // namespace playerval::ingest
