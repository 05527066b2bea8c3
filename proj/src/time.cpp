#include "orderlens/time.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace orderlens {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool is_leap(std::int64_t y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                         31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

bool parse_fixed_uint(std::string_view s, size_t pos, size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        char c = s[i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace

TimePoint TimePoint::from_civil(int year, int month, int day, int hour, int minute) {
    std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                        static_cast<unsigned>(day));
    return TimePoint(days * 1440 + hour * 60 + minute);
}

std::optional<TimePoint> TimePoint::parse(std::string_view text) {
    // YYYY-MM-DD[T ]HH:MM[:SS]
    if (text.size() != 16 && text.size() != 19) return std::nullopt;
    unsigned year, month, day, hour, minute;
    if (!parse_fixed_uint(text, 0, 4, year)) return std::nullopt;
    if (text[4] != '-') return std::nullopt;
    if (!parse_fixed_uint(text, 5, 2, month)) return std::nullopt;
    if (text[7] != '-') return std::nullopt;
    if (!parse_fixed_uint(text, 8, 2, day)) return std::nullopt;
    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    if (!parse_fixed_uint(text, 11, 2, hour)) return std::nullopt;
    if (text[13] != ':') return std::nullopt;
    if (!parse_fixed_uint(text, 14, 2, minute)) return std::nullopt;
    if (text.size() == 19) {
        unsigned sec;
        if (text[16] != ':') return std::nullopt;
        if (!parse_fixed_uint(text, 17, 2, sec)) return std::nullopt;
        if (sec > 59) return std::nullopt;
    }
    if (month < 1 || month > 12) return std::nullopt;
    if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
    if (hour > 23 || minute > 59) return std::nullopt;
    return from_civil(static_cast<int>(year), static_cast<int>(month),
                      static_cast<int>(day), static_cast<int>(hour),
                      static_cast<int>(minute));
}

std::string TimePoint::to_string() const {
    std::int64_t days = minutes_ / 1440;
    std::int64_t rem = minutes_ % 1440;
    if (rem < 0) {
        rem += 1440;
        days -= 1;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld",
                  static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 60), static_cast<long long>(rem % 60));
    return buf;
}

}
