#include "playerval/ranking.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace playerval;
using ingest::PlayerId;

namespace {

// O(n^2) pair-counting reference.
double kendall_oracle(const std::vector<PlayerId>& a, const std::vector<PlayerId>& b) {
    std::map<PlayerId, int> pa, pb;
    for (std::size_t i = 0; i < a.size(); ++i) pa[a[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < b.size(); ++i) pb[b[i]] = static_cast<int>(i);
    int concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const int da = pa[a[i]] - pa[a[j]];
            const int db = pb[a[i]] - pb[a[j]];
            (da * db > 0 ? concordant : discordant)++;
        }
    }
    const double total = static_cast<double>(a.size() * (a.size() - 1)) / 2.0;
    return (concordant - discordant) / total;
}

} // namespace

TEST_CASE("kendall tau basics") {
    const std::vector<PlayerId> base = {1, 2, 3, 4};
    CHECK(ranking::kendall_tau(base, base) == 1.0);
    const std::vector<PlayerId> reversed = {4, 3, 2, 1};
    CHECK(ranking::kendall_tau(base, reversed) == -1.0);
    const std::vector<PlayerId> swapped = {1, 3, 2, 4};
    CHECK(ranking::kendall_tau(base, swapped) == doctest::Approx(2.0 / 3.0));
    // 5 concordant, 1 discordant of 6 pairs
    CHECK(kendall_oracle(base, swapped) == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(ranking::kendall_tau(base, {1, 2, 3}), Error);
    CHECK_THROWS_AS(ranking::kendall_tau(base, {1, 2, 3, 9}), Error);
    CHECK_THROWS_AS(ranking::kendall_tau({1, 1, 2, 3}, base), Error);
}

TEST_CASE("kendall tau matches the quadratic oracle on random permutation pairs") {
    Rng rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(7); // up to 8 items
        std::vector<PlayerId> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<PlayerId>(i + 1);
        b = a;
        rng.shuffle(a);
        rng.shuffle(b);
        const double fast = ranking::kendall_tau(a, b);
        CHECK(fast == kendall_oracle(a, b));
        CHECK(fast == ranking::kendall_tau(b, a)); // symmetry
    }
}

TEST_CASE("top-k restriction is an explicit mode") {
    const std::vector<PlayerId> reference = {1, 2, 3, 4, 5, 6};
    const std::vector<PlayerId> other = {6, 5, 4, 3, 2, 1};
    CHECK(ranking::kendall_tau_on_top_k(reference, other, 6) == -1.0);
    // restricted to the reference's top 3, the other ranking is also fully
    // reversed on those items
    CHECK(ranking::kendall_tau_on_top_k(reference, other, 3) == -1.0);
    const std::vector<PlayerId> partial = {1, 2, 3, 6, 5, 4};
    CHECK(ranking::kendall_tau_on_top_k(reference, partial, 3) == 1.0);
}

TEST_CASE("rank_players orders by descending value with id tie-break") {
    features::FeatureTable t;
    t.columns = {"x"};
    t.kinds = {features::ColumnKind::Continuous};
    t.X = Matrix(4, 1);
    t.X.at(0, 0) = 1.0; // id 30
    t.X.at(1, 0) = 3.0; // id 10
    t.X.at(2, 0) = 1.0; // id 20, ties with id 30
    t.X.at(3, 0) = 2.0; // id 40
    t.y = {0, 0, 0, 0};
    t.player_ids = {30, 10, 20, 40};

    lasso::LassoModel model;
    model.intercept = 10.0;
    model.coefficients = {1.0};

    std::map<PlayerId, std::string> names = {{10, "A"}, {20, "B"}, {30, "C"}, {40, "D"}};
    const auto report = ranking::rank_players(model, t, names);
    REQUIRE(report.entries.size() == 4);
    CHECK(report.entries[0].player_id == 10);
    CHECK(report.entries[1].player_id == 40);
    CHECK(report.entries[2].player_id == 20); // tie: lower id first
    CHECK(report.entries[3].player_id == 30);
    CHECK(report.entries[0].rank == 1);
    CHECK(report.entries[3].rank == 4);
    CHECK(report.entries[0].predicted_value == doctest::Approx(std::exp(13.0)));

    // argsort invariance: ordering by currency value equals ordering by log
    auto by_currency = report.entries;
    std::stable_sort(by_currency.begin(), by_currency.end(),
                     [](const auto& a, const auto& b) { return a.predicted_value > b.predicted_value; });
    for (std::size_t i = 0; i < by_currency.size(); ++i)
        CHECK(by_currency[i].player_id == report.entries[i].player_id);
}

TEST_CASE("young table: last first-division game before 22, one-hots, target window") {
    ingest::Corpus corpus;
    // player 1: qualifies; t = 2021-05-20 (the later L1 game before age 22)
    {
        auto m1 = testutil::make_match(1, "2021-01-10", "L1", 90, 1);
        auto m2 = testutil::make_match(1, "2021-05-20", "L1", 90, 2);
        auto m3 = testutil::make_match(1, "2021-07-01", "L2", 90, 5); // second division
        auto m4 = testutil::make_match(1, "2022-07-01", "L1", 90, 4); // after turning 22
        corpus.matches.insert(corpus.matches.end(), {m1, m2, m3, m4});
        corpus.valuations.push_back({1, parse_date("2021-01-01"), 2.0e6});
        corpus.valuations.push_back({1, parse_date("2022-06-10"), 8.0e6}); // 21 days from t+365
        corpus.profiles.emplace(1, testutil::make_profile(1, "2000-06-01", {"WG", "FWD"}, "L1"));
    }
    // player 2: no first-division appearances before 22
    {
        corpus.matches.push_back(testutil::make_match(2, "2021-03-01", "L2", 90, 0));
        corpus.valuations.push_back({2, parse_date("2022-03-01"), 1.0e6});
        corpus.profiles.emplace(2, testutil::make_profile(2, "2001-01-01", {"MD"}, "L2"));
    }
    // player 3: plays but has no valuation near t+365
    {
        corpus.matches.push_back(testutil::make_match(3, "2021-04-01", "L1", 90, 0));
        corpus.valuations.push_back({3, parse_date("2021-04-02"), 1.0e6});
        corpus.profiles.emplace(3, testutil::make_profile(3, "2001-02-01", {"GK"}, "L1"));
    }
    std::sort(corpus.matches.begin(), corpus.matches.end(), [](const auto& a, const auto& b) {
        return std::tie(a.player_id, a.match_date.days) < std::tie(b.player_id, b.match_date.days);
    });

    const std::set<std::string> first_division = {"L1"};
    const auto table = ranking::build_young_table(corpus, first_division, {});
    REQUIRE(table.n() == 1);
    CHECK(table.player_ids[0] == 1);
    CHECK(table.y[0] == doctest::Approx(std::log(8.0e6)));

    // window sums: both L1 games before t inclusive, the L2 game excluded
    const auto goals_col = table.column_index("total_goals").value();
    CHECK(table.X.at(0, goals_col) == doctest::Approx(3.0 / 180.0)); // per-minute rate

    CHECK(table.X.at(0, table.column_index("pos_WG").value()) == 1.0);
    CHECK(table.X.at(0, table.column_index("pos_FWD").value()) == 1.0);
    CHECK(table.X.at(0, table.column_index("pos_GK").value()) == 0.0);

    // age at t, not at the value date
    CHECK(table.X.at(0, table.column_index("age").value()) ==
          doctest::Approx(age_years(parse_date("2000-06-01"), parse_date("2021-05-20"))));
}

TEST_CASE("young table raises EmptyTable when nobody qualifies") {
    ingest::Corpus corpus;
    corpus.matches.push_back(testutil::make_match(1, "2021-03-01", "L2", 90, 0));
    corpus.valuations.push_back({1, parse_date("2022-03-01"), 1.0e6});
    corpus.profiles.emplace(1, testutil::make_profile(1, "2001-01-01", {"MD"}, "L2"));
    try {
        ranking::build_young_table(corpus, {"L1"}, {});
        FAIL("expected EmptyTable");
    } catch (const Error& e) {
        CHECK(e.name() == "EmptyTable");
    }
}

TEST_CASE("reference scoring reports tau over the common set") {
    ranking::RankingReport report;
    for (int i = 0; i < 5; ++i) {
        ranking::RankedPlayer rp;
        rp.rank = i + 1;
        rp.player_id = i + 1; // predicted order 1,2,3,4,5
        report.entries.push_back(rp);
    }
    ranking::ReferenceRanking reference;
    reference.players = {2, 1, 3, 7}; // 7 is unknown to the prediction
    ranking::score_against_reference(report, reference);
    CHECK(report.has_reference);
    CHECK(report.reference_common == 3);
    // common set {1,2,3}: reference order (2,1,3) vs predicted (1,2,3):
    // one discordant of three pairs
    CHECK(report.kendall_tau_vs_reference == doctest::Approx(1.0 / 3.0));
}
