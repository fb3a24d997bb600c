#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace surrocal::csv {

// Header row plus raw string cells. Quoted fields with embedded commas and
// doubled quotes are honoured; '#' lines before the header are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Index of a header column or -1.
  long column(std::string_view name) const;
};

Table read(std::istream& in, const std::string& source_name);
Table read(const std::filesystem::path& path);

// Locale-independent parse of the whole cell; throws DataError naming the
// source, line and column when the cell is not a finite number.
double parse_number(std::string_view cell, const std::string& source, std::size_t line,
                    std::string_view column);

// Shortest representation that parses back to the same double.
std::string format_number(double value);

// Quotes the cell if it contains a comma, quote or newline.
std::string escape(std::string_view cell);

}  // namespace surrocal::csv
