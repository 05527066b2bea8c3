#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace orderlens {

// Minute-resolution civil timestamp (no timezone). All event times and
// anchors use this type; durations derived from it are reported in hours.
class TimePoint {
public:
    TimePoint() = default;
    explicit constexpr TimePoint(std::int64_t minutes_since_epoch)
        : minutes_(minutes_since_epoch) {}

    static TimePoint from_civil(int year, int month, int day, int hour, int minute);

    // Accepts "YYYY-MM-DDTHH:MM", a space instead of 'T', and an optional
    // ":SS" suffix (seconds are floored away).
    static std::optional<TimePoint> parse(std::string_view text);

    std::string to_string() const;  // "YYYY-MM-DDTHH:MM"

    constexpr std::int64_t minutes() const { return minutes_; }
    constexpr int minute_of_day() const {
        auto m = minutes_ % 1440;
        return static_cast<int>(m < 0 ? m + 1440 : m);
    }

    constexpr TimePoint plus_minutes(std::int64_t m) const { return TimePoint(minutes_ + m); }
    constexpr TimePoint plus_hours(std::int64_t h) const { return TimePoint(minutes_ + h * 60); }

    friend constexpr auto operator<=>(TimePoint, TimePoint) = default;

private:
    std::int64_t minutes_ = 0;  // since 1970-01-01T00:00
};

// Signed duration from `a` to `b` in hours.
constexpr double hours_between(TimePoint a, TimePoint b) {
    return static_cast<double>(b.minutes() - a.minutes()) / 60.0;
}

}
