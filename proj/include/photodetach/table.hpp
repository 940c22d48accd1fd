#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace photodetach {

/// Column-named numeric table; the on-disk form is CSV.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws std::out_of_range
  std::vector<double> column(const std::string& name) const;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.{digits-1}e" in the C locale, e.g. 12 digits -> 1.23456789012e-03.
std::string format_scientific(double value, int significant_digits = 12);

/// Header row, then one line per row; comma separated, LF endings, values in
/// scientific notation with `significant_digits` digits.
void write_table(const Table& table, std::ostream& out, int significant_digits = 12);
/// Throws IoError naming the path when the file cannot be written.
void write_table(const Table& table, const std::filesystem::path& path, int significant_digits = 12);

/// Parses CSV written by write_table. Blank lines and lines starting with '#' are skipped.
Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);

}  // namespace photodetach
