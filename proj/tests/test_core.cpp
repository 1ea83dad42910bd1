#include "playerval/csv.hpp"
#include "playerval/dates.hpp"
#include "playerval/error.hpp"
#include "playerval/kvfile.hpp"
#include "playerval/rng.hpp"

#include <doctest.h>

using namespace playerval;

TEST_CASE("date parse/format round trip") {
    const auto d = parse_date("2020-03-01");
    CHECK(format_date(d) == "2020-03-01");
    CHECK(parse_date("1970-01-01").days == 0);
    CHECK(parse_date("1970-01-02").days == 1);
    CHECK(parse_date("2000-02-29").days == make_date(2000, 2, 29).days);
    CHECK_THROWS_AS(parse_date("2020-13-01"), Error);
    CHECK_THROWS_AS(parse_date("2021-02-29"), Error);
    CHECK_THROWS_AS(parse_date("2020/01/01"), Error);
    CHECK_THROWS_AS(parse_date("garbage"), Error);
}

TEST_CASE("date arithmetic") {
    const auto t = parse_date("2022-01-01");
    CHECK(t.plus_days(-730) == parse_date("2020-01-02"));
    CHECK(t - parse_date("2021-01-01") == 365);
    CHECK(add_years(parse_date("2000-02-29"), 22) == parse_date("2022-02-28"));
    CHECK(add_years(parse_date("2000-05-01"), 22) == parse_date("2022-05-01"));
    CHECK(age_years(parse_date("2000-01-01"), parse_date("2022-01-01")) == doctest::Approx(22.0).epsilon(0.001));
}

TEST_CASE("csv parse handles quotes, comments, crlf") {
    const auto table = csv::parse("# provenance line\na,b\r\n1,\"x,\"\"y\"\"\"\n\n2,\n", "mem");
    CHECK(table.header == std::vector<std::string>{"a", "b"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "x,\"y\"");
    CHECK(table.rows[1][1] == "");
    CHECK(csv::escape_field("plain") == "plain");
    CHECK(csv::escape_field("a,b") == "\"a,b\"");
}

TEST_CASE("format_double round trips") {
    for (const double v : {0.1, 1.0 / 3.0, 1e300, -4.059712e6, 15.216438749077827}) {
        const auto s = csv::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("kv file parsing") {
    const auto kv = kv::parse_kv("a = 1\n# comment\nb = \"two words\" \nflag = true\n", "mem");
    CHECK(kv.number("a") == 1.0);
    CHECK(kv.get("b") == "two words");
    CHECK(kv.flag_or("flag", false));
    CHECK(kv.integer_or("absent", 7) == 7);
    CHECK_THROWS_AS(kv.get("absent"), Error);
}

TEST_CASE("rng determinism and bounds") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng r(7);
    for (int i = 0; i < 1000; ++i) {
        CHECK(r.below(10) < 10);
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    const auto sample = r.sample_indices(20, 5);
    CHECK(sample.size() == 5);
    CHECK(std::is_sorted(sample.begin(), sample.end()));
    for (std::size_t i = 1; i < sample.size(); ++i) CHECK(sample[i] != sample[i - 1]);
}

TEST_CASE("split_seed decorrelates streams") {
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
}
