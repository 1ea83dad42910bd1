#pragma once

#include "playerval/error.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace playerval {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// All pipeline arithmetic (windows, ages) is plain integer day math, so
// parsing and formatting are the only places the y/m/d form appears.
struct Date {
    std::int32_t days = 0;

    friend auto operator<=>(const Date&, const Date&) = default;

    Date plus_days(std::int32_t n) const { return Date{days + n}; }
    std::int32_t operator-(const Date& o) const { return days - o.days; }
};

namespace detail {

// Howard Hinnant's civil-date algorithms.
constexpr std::int32_t days_from_civil(std::int32_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int32_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int32_t>(doe) - 719468;
}

constexpr std::array<std::int32_t, 3> civil_from_days(std::int32_t z) {
    z += 719468;
    const std::int32_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int32_t y = static_cast<std::int32_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<std::int32_t>(m), static_cast<std::int32_t>(d)};
}

constexpr bool is_leap(std::int32_t y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr unsigned last_day_of_month(std::int32_t y, unsigned m) {
    constexpr std::array<unsigned, 12> len{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : len[m - 1];
}

} // namespace detail

inline Date make_date(std::int32_t y, unsigned m, unsigned d) {
    return Date{detail::days_from_civil(y, m, d)};
}

// Strict ISO-8601 calendar date, YYYY-MM-DD.
inline Date parse_date(std::string_view s) {
    const auto bad = [&] { raise("MalformedRow", "invalid ISO-8601 date '" + std::string(s) + "'"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
    std::int32_t v[3] = {0, 0, 0};
    const int spans[3][2] = {{0, 4}, {5, 2}, {8, 2}};
    for (int f = 0; f < 3; ++f) {
        for (int i = 0; i < spans[f][1]; ++i) {
            const char c = s[spans[f][0] + i];
            if (c < '0' || c > '9') bad();
            v[f] = v[f] * 10 + (c - '0');
        }
    }
    const std::int32_t y = v[0];
    const auto m = static_cast<unsigned>(v[1]);
    const auto d = static_cast<unsigned>(v[2]);
    if (m < 1 || m > 12 || d < 1 || d > detail::last_day_of_month(y, m)) bad();
    return make_date(y, m, d);
}

inline std::string format_date(Date t) {
    const auto ymd = detail::civil_from_days(t.days);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", ymd[0], ymd[1], ymd[2]);
    return buf;
}

// Same calendar day n years later; Feb 29 clamps to Feb 28.
inline Date add_years(Date t, std::int32_t n) {
    auto [y, m, d] = detail::civil_from_days(t.days);
    y += n;
    const auto last = detail::last_day_of_month(y, static_cast<unsigned>(m));
    if (static_cast<unsigned>(d) > last) d = static_cast<std::int32_t>(last);
    return make_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

inline double age_years(Date birth, Date at) {
    return static_cast<double>(at - birth) / 365.25;
}

} // namespace playerval
