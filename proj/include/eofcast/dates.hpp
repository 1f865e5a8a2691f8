#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace eofcast {

/// Proleptic Gregorian calendar date at daily resolution.
struct Date {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    auto operator<=>(const Date&) const = default;

    bool valid() const;

    /// Days since 1970-01-01 (negative before the epoch).
    std::int64_t day_number() const;

    static Date from_day_number(std::int64_t dn);

    /// Parses strict `YYYY-MM-DD`; throws MalformedRow on anything else.
    static Date parse_iso(const std::string& s);

    std::string to_string() const;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

/// Date advanced by `days` calendar days.
Date add_days(const Date& d, std::int64_t days);

} // namespace eofcast
