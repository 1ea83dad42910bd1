#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace playerval::schema {

// The per-game statistics glossary. Index into this array is the StatId used
// by MatchRecord's dense stat vector; order is the canonical column order of
// matches.csv.
const std::vector<std::string>& stat_names();
std::size_t stat_count();
std::optional<std::size_t> stat_index(std::string_view name);

// (successful, attempted) stat pairs: within one record the first member can
// never exceed the second. Enforced at parse time and respected by the
// synthetic generator.
struct StatPair {
    std::size_t success;
    std::size_t attempt;
};
const std::vector<StatPair>& capped_pairs();

// Engineered quotient features, one per row of the ratio-definition table.
// Computed from window sums; denominator 0 maps to ratio 0.
struct RatioDef {
    std::string name;
    // Index into stat_names(), or kActionsTotal for the synthesized
    // defensive+attacking actions denominator.
    std::size_t numerator;
    std::size_t denominator;
};
inline constexpr std::size_t kActionsTotal = static_cast<std::size_t>(-1);
const std::vector<RatioDef>& ratio_defs();

// Position datasets. Code order is fixed; one-hot columns and per-position
// outputs follow it.
inline constexpr std::array<std::string_view, 8> kPositionCodes = {
    "GK", "FB", "CD", "CDM", "MD", "AM", "WG", "FWD"};

bool is_position_code(std::string_view code);

// label -> code mapping loaded from position_aliases.csv. The canonical table
// shipped in config/ covers the TransferMarkt labels; deployments may extend
// it (e.g. "Libero" -> CD).
struct PositionAliases {
    std::vector<std::pair<std::string, std::string>> entries; // (label, code)

    std::optional<std::string> code_for(const std::string& label) const {
        for (const auto& [l, c] : entries)
            if (l == label) return c;
        return std::nullopt;
    }
};

// Built-in aliases for the canonical TransferMarkt labels; used when no
// alias file is supplied and written out by the config generator.
PositionAliases builtin_aliases();

// Frequently used stat ids, resolved once.
struct WellKnown {
    std::size_t matches;
    std::size_t minutes;
    std::size_t goals;
    std::size_t assists;
    std::size_t shots;
};
const WellKnown& well_known();

} // namespace playerval::schema
