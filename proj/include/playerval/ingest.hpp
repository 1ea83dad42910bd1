#pragma once

#include "playerval/dates.hpp"
#include "playerval/schema.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace playerval::ingest {

using PlayerId = std::int64_t;

// One player-game row. Stats are stored densely in schema::stat_names()
// order; columns absent from the source file are 0 (a stat sheet legitimately
// omits inapplicable stats, e.g. goalkeeper counters for outfielders).
struct MatchRecord {
    PlayerId player_id = 0;
    Date match_date;
    std::string league_id;
    std::vector<double> stats; // size schema::stat_count()

    double stat(std::size_t id) const { return stats[id]; }

    bool operator==(const MatchRecord&) const = default;
};

struct ValuationSnapshot {
    PlayerId player_id = 0;
    Date value_date;
    double market_value = 0.0; // currency units, > 0

    bool operator==(const ValuationSnapshot&) const = default;
};

struct PlayerProfile {
    PlayerId player_id = 0;
    std::string name;
    Date birth_date;
    std::set<std::string> positions;      // raw labels from the source file
    std::set<std::string> position_codes; // labels resolved via the alias table
    std::string league_id;
    std::string youth_club;  // may be empty
    double height_cm = 0.0;  // 0 = unknown; imputed downstream

    bool operator==(const PlayerProfile&) const = default;
};

// Joined, validated in-memory dataset. Matches and valuations are sorted by
// (player_id, date); immutable once built.
struct Corpus {
    std::vector<MatchRecord> matches;
    std::vector<ValuationSnapshot> valuations;
    std::map<PlayerId, PlayerProfile> profiles;

    bool operator==(const Corpus&) const = default;
};

struct JoinReport {
    std::size_t players_kept = 0;
    std::size_t match_players_dropped = 0;
    std::size_t valuation_players_dropped = 0;
    std::size_t profile_players_dropped = 0;
    std::size_t match_rows_dropped = 0;
    std::size_t valuation_rows_dropped = 0;
};

struct JoinResult {
    Corpus corpus;
    JoinReport report;
};

std::vector<MatchRecord> parse_matches(const std::string& path);
std::vector<ValuationSnapshot> parse_valuations(const std::string& path);
std::map<PlayerId, PlayerProfile> parse_profiles(const std::string& path,
                                                 const schema::PositionAliases& aliases);

// In-memory variants; file parsing above is a thin wrapper over these.
std::vector<MatchRecord> parse_matches_text(const std::string& text, const std::string& origin);
std::vector<ValuationSnapshot> parse_valuations_text(const std::string& text, const std::string& origin);
std::map<PlayerId, PlayerProfile> parse_profiles_text(const std::string& text, const std::string& origin,
                                                      const schema::PositionAliases& aliases);

// Keeps exactly the players present in all three sources.
JoinResult join_corpus(std::vector<MatchRecord> matches,
                       std::vector<ValuationSnapshot> valuations,
                       std::map<PlayerId, PlayerProfile> profiles);

// Inverse of the parsers, same schemas; parse(write(corpus)) == corpus.
// header_comment, when non-empty, is emitted as a leading '#' line.
void write_matches_csv(const std::string& path, const std::vector<MatchRecord>& matches,
                       const std::string& header_comment = "");
void write_valuations_csv(const std::string& path, const std::vector<ValuationSnapshot>& valuations,
                          const std::string& header_comment = "");
void write_profiles_csv(const std::string& path, const std::map<PlayerId, PlayerProfile>& profiles,
                        const std::string& header_comment = "");

std::set<std::string> read_club_list(const std::string& path);
schema::PositionAliases read_position_aliases(const std::string& path);
std::map<std::string, int> read_league_tiers(const std::string& path);

} // namespace playerval::ingest
