#include "eofcast/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "eofcast/errors.hpp"

namespace eofcast {

bool is_leap_year(int year)
{
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month)
{
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

bool Date::valid() const
{
    if (month < 1 || month > 12) return false;
    if (day < 1 || day > days_in_month(year, month)) return false;
    return true;
}

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t Date::day_number() const
{
    const std::int64_t y = year - (month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::int64_t yoe = y - era * 400;
    const std::int64_t doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

Date Date::from_day_number(std::int64_t dn)
{
    const std::int64_t z = dn + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2 ? 1 : 0)), static_cast<int>(m),
                static_cast<int>(d)};
}

Date Date::parse_iso(const std::string& s)
{
    auto fail = [&] { throw MalformedRow("invalid date '" + s + "': expected YYYY-MM-DD"); };

    if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') fail();

    Date d;
    std::from_chars(s.data(), s.data() + 4, d.year);
    std::from_chars(s.data() + 5, s.data() + 7, d.month);
    std::from_chars(s.data() + 8, s.data() + 10, d.day);
    if (!d.valid()) fail();
    return d;
}

std::string Date::to_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date add_days(const Date& d, std::int64_t days)
{
    return Date::from_day_number(d.day_number() + days);
}

} // namespace eofcast
