#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace codeprov {

/// A UTC instant with millisecond precision.
struct Timestamp {
  int64_t millis = 0;  // milliseconds since the Unix epoch

  auto operator<=>(const Timestamp&) const = default;

  static Timestamp from_unix_seconds(int64_t seconds) { return Timestamp{seconds * 1000}; }
  static Timestamp from_unix_millis(int64_t ms) { return Timestamp{ms}; }
};

/// Parses an ISO-8601 date or date-time. Accepts "YYYY-MM-DD",
/// "YYYY-MM-DDTHH:MM:SS", an optional fractional-second part, and an
/// optional zone suffix ("Z", "+HH:MM", "-HHMM"). A missing zone is
/// read as UTC, which is how Stack Exchange dumps encode dates.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string format_timestamp(Timestamp ts);

/// Whole days from `from` to `to`, rounded toward negative infinity.
int64_t days_between(Timestamp from, Timestamp to);

int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(int64_t days, int& year, unsigned& month, unsigned& day);

}  // namespace codeprov
