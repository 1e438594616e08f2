#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codeprov {

/// Fatal input error: the run cannot continue. The CLI maps this to exit code 1.
class FatalError : public std::runtime_error {
 public:
  explicit FatalError(const std::string& what) : std::runtime_error(what) {}
};

std::string to_lower_ascii(std::string_view s);
std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string_view> split_lines(std::string_view text);
std::string collapse_whitespace(std::string_view s);

uint64_t fnv1a64(std::string_view s);
std::string hex64(uint64_t v, int digits = 16);

std::string read_file(const std::filesystem::path& path);
/// Reads a file as UTF-8, replacing invalid byte sequences with U+FFFD.
/// Sets `had_invalid` when any replacement happened.
std::string read_file_lossy_utf8(const std::filesystem::path& path, bool& had_invalid);
void write_file(const std::filesystem::path& path, std::string_view content);

/// One row of a CSV file (RFC-4180 quoting, no embedded newlines in fields).
struct CsvRow {
  int line_number = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

/// Runs a command, capturing stdout. Returns the exit status. Arguments are
/// shell-quoted; stderr is discarded.
int run_command(const std::vector<std::string>& args, std::string& output);

std::string json_escape(std::string_view s);

/// Fixed-point decimal rendering used by the serialized formats.
std::string format_decimal(double value, int digits);

}  // namespace codeprov
