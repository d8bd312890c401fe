#pragma once

// Minimal RFC 4180-ish CSV helpers shared by the loaders and writers.

#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "jshare/common.hpp"

namespace jshare::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<std::string> split_line(std::string_view line, std::size_t line_no);

/// Reads a CSV stream whose first line must equal `header` (after trimming a
/// trailing CR and an optional UTF-8 BOM). Blank lines are skipped.
std::vector<Row> read(std::istream& in, std::string_view header);

std::string quote(std::string_view field);

template <typename T>
T parse_number(const Row& row, std::size_t column, std::string_view name) {
  const std::string& text = row.fields.at(column);
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ParseError(row.line, "invalid " + std::string(name) + " '" + text + "'");
  }
  return value;
}

}  // namespace jshare::csv
