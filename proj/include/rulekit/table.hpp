#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rulekit {

/// Raw delimiter-separated table: header row plus string cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_count() const { return header.size(); }
  std::size_t row_count() const { return rows.size(); }
  std::optional<std::size_t> find_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;  // throws if absent
};

/// Reads comma-separated text with a header row. Fields containing the
/// delimiter, quotes or newlines are double-quoted; "" escapes a quote.
Table read_csv(std::istream& in, char delimiter = ',');
Table read_csv_file(const std::filesystem::path& path, char delimiter = ',');

void write_csv(std::ostream& out, const Table& table, char delimiter = ',');
std::string quote_csv_field(std::string_view field, char delimiter = ',');

}  // namespace rulekit
