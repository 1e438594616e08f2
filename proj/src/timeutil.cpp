#include "codeprov/timeutil.hpp"

#include <cstdio>

namespace codeprov {

namespace {

bool read_digits(std::string_view text, size_t& pos, int count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (int i = 0; i < count; ++i) {
    char c = text[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  out = value;
  return true;
}

}  // namespace

int64_t days_from_civil(int year, unsigned month, unsigned day) {
  year -= month <= 2;
  const int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t days, int& year, unsigned& month, unsigned& day) {
  days += 719468;
  const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = y + (month <= 2);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  size_t pos = 0;
  int year = 0, month = 0, day = 0;
  if (!read_digits(text, pos, 4, year)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, month)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, day)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

  int hour = 0, minute = 0, second = 0;
  int64_t frac_ms = 0;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    ++pos;
    if (!read_digits(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, minute)) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_digits(text, pos, 2, second)) return std::nullopt;
    }
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      int seen = 0;
      int64_t scale = 100;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (seen < 3) frac_ms += (text[pos] - '0') * scale;
        scale /= 10;
        ++seen;
        ++pos;
      }
      if (seen == 0) return std::nullopt;
    }
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
  }

  int64_t offset_minutes = 0;
  if (pos < text.size()) {
    char c = text[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int sign = c == '+' ? 1 : -1;
      ++pos;
      int oh = 0, om = 0;
      if (!read_digits(text, pos, 2, oh)) return std::nullopt;
      if (pos < text.size() && text[pos] == ':') ++pos;
      if (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (!read_digits(text, pos, 2, om)) return std::nullopt;
      }
      offset_minutes = sign * (oh * 60 + om);
    }
  }
  if (pos != text.size()) return std::nullopt;

  int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  int64_t ms = ((days * 24 + hour) * 60 + minute) * 60000 + second * 1000LL + frac_ms;
  ms -= offset_minutes * 60000;
  return Timestamp{ms};
}

std::string format_timestamp(Timestamp ts) {
  int64_t ms = ts.millis;
  int64_t days = ms / 86400000;
  int64_t rem = ms % 86400000;
  if (rem < 0) {
    rem += 86400000;
    --days;
  }
  int year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  int hour = static_cast<int>(rem / 3600000);
  rem %= 3600000;
  int minute = static_cast<int>(rem / 60000);
  rem %= 60000;
  int second = static_cast<int>(rem / 1000);
  int milli = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", year, month, day, hour,
                minute, second, milli);
  return buf;
}

int64_t days_between(Timestamp from, Timestamp to) {
  int64_t diff = to.millis - from.millis;
  int64_t d = diff / 86400000;
  if (diff % 86400000 != 0 && diff < 0) --d;
  return d;
}

}  // namespace codeprov
