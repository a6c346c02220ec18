#pragma once

#include <string>
#include <vector>

namespace avsim {

/// Parsed comma-separated table. Lines starting with '#' and blank lines are
/// skipped; the first remaining line is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws ConfigError if absent
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

/// Shortest round-trip decimal form of x (17 significant digits).
std::string fmt_double(double x);

/// Writes `content` to `path` via a temporary file in the same directory and
/// a rename, so readers never observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace avsim
