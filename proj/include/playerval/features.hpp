#pragma once

#include "playerval/ingest.hpp"
#include "playerval/matrix.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace playerval::features {

using ingest::Corpus;
using ingest::PlayerId;

// Aggregation window relative to the target value date t:
// matches with date in [t - horizon - length, t - horizon) contribute.
struct WindowSpec {
    int horizon_days = 730;
    int window_length_days = 730;
};

enum class ColumnKind {
    Continuous, // (x - mean) / max(raw column)
    LeagueLog,  // mean-centering only
    Boolean     // untouched
};

struct NormStat {
    double mean = 0.0;
    double scale = 1.0;
    bool degenerate = false; // max(raw column) was 0; column maps to all-zeros
};

// Design matrix + log-value targets for one position dataset. Built raw,
// then normalized out-of-place; norm_stats stay empty until normalize().
struct FeatureTable {
    std::string position_code;
    std::vector<std::string> columns;
    std::vector<ColumnKind> kinds;
    Matrix X;
    std::vector<double> y; // ln(market value)
    std::vector<PlayerId> player_ids;
    std::vector<NormStat> norm_stats;

    std::size_t n() const { return X.rows; }
    std::size_t d() const { return X.cols; }
    bool normalized() const { return !norm_stats.empty(); }
    std::optional<std::size_t> column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        return std::nullopt;
    }
};

// Fixed column order of the design matrix: per-minute stat rates (minutes and
// matches stay window totals), then the ratio features, then the profile /
// league block, then (young dataset only) the position one-hots.
struct FeatureLayout {
    std::vector<std::string> columns;
    std::vector<ColumnKind> kinds;

    std::size_t index_of(const std::string& name) const;

    static const FeatureLayout& base();
    static const FeatureLayout& with_position_onehots();
};

struct WindowAggregate {
    std::vector<double> sums;  // per stat id, window totals
    std::vector<double> rates; // per stat id; minutes/matches kept as totals
    double minutes = 0.0;
};

// Half-open interval aggregation [from, to); first-division filtering for the
// young-player dataset is expressed through leagues_allowed.
WindowAggregate aggregate_interval(const Corpus& corpus, PlayerId player, Date from, Date to,
                                   const std::set<std::string>* leagues_allowed = nullptr);

WindowAggregate aggregate_window(const Corpus& corpus, PlayerId player, Date value_date,
                                 const WindowSpec& spec);

// The engineered quotient block, from window sums. Denominator 0 gives 0.
std::vector<double> ratio_features(const std::vector<double>& window_sums);
const std::vector<std::string>& ratio_names();

// Latest-valuation and league-average lookups over the joined corpus.
class LeagueValueIndex {
public:
    explicit LeagueValueIndex(const Corpus& corpus);

    std::optional<double> latest_value(PlayerId player, Date on_or_before) const;
    Date last_value_date(PlayerId player) const; // requires >= 1 snapshot

    // ln(mean market value over league members' latest valuations on or
    // before t); members without one are skipped. Empty when none qualify.
    std::optional<double> league_log_avg(const std::string& league_id, Date t) const;

private:
    struct Span {
        std::size_t begin = 0;
        std::size_t end = 0;
    };
    const Corpus* corpus_;
    std::map<PlayerId, Span> value_spans_;
    std::map<std::string, std::vector<PlayerId>> league_members_;
};

// Fills the profile/league block of a feature row: age, age_sq, height,
// height_sq, squared rates, is_top_20, league_avg_value (raw ln scale; the
// corpus mean is subtracted by the table builder). Missing height and missing
// league averages are NaN until impute_missing().
void augment_features(std::vector<double>& row, const WindowAggregate& agg,
                      const ingest::PlayerProfile& profile, Date t, const LeagueValueIndex& leagues,
                      const std::set<std::string>& top20_clubs);

std::vector<double> assemble_row(const FeatureLayout& layout, const WindowAggregate& agg,
                                 const ingest::PlayerProfile& profile, Date t,
                                 const LeagueValueIndex& leagues, const std::set<std::string>& top20_clubs);

struct BuildOptions {
    int n_threads = 0; // 0 = OpenMP default, 1 = serial reference
};

// ln(market value), rejecting values outside the realistic (0, 25) log range
// with a ValueOutOfRange error.
double checked_log_value(double market_value, PlayerId player);

// One table per position code present in the corpus; a player contributes a
// row (identical features) to every table his codes map to. Target date is
// his last valuation; rows with no playing time in the window are dropped.
std::map<std::string, FeatureTable> build_position_tables(const Corpus& corpus, const WindowSpec& spec,
                                                          const std::set<std::string>& top20_clubs,
                                                          const BuildOptions& opts = {});

// Column-mean imputation of NaN cells; returns imputed column names.
std::vector<std::string> impute_missing(FeatureTable& table);

FeatureTable normalize(const FeatureTable& raw);

std::vector<double> apply_norm_stats(const std::vector<double>& raw_row,
                                     const std::vector<NormStat>& stats,
                                     const std::vector<ColumnKind>& kinds);
Matrix apply_norm_stats(const Matrix& raw, const std::vector<NormStat>& stats,
                        const std::vector<ColumnKind>& kinds);

// Drops one column (e.g. the league average) from a raw or normalized table.
FeatureTable drop_column(const FeatureTable& table, const std::string& name);

void write_feature_csv(const std::string& path, const FeatureTable& table,
                       const std::string& header_comment = "");

} // namespace playerval::features
