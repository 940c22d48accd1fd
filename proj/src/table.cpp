#include "photodetach/table.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace photodetach {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_number(const std::string& text, std::size_t line_number) {
  const std::string token = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size() || token.empty())
    throw IoError("line " + std::to_string(line_number) + ": cannot parse number '" + token + "'");
  return value;
}

}  // namespace

std::size_t Table::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(const std::string& name) const {
  const std::size_t index = column_index(name);
  std::vector<double> values;
  values.reserve(rows.size());
  for (const auto& row : rows) values.push_back(row.at(index));
  return values;
}

std::string format_scientific(double value, int significant_digits) {
  // snprintf with %e is correctly rounded on glibc and independent of locale
  // digits; the decimal point is '.' in the default C locale.
  char buffer[64];
  const int written =
      std::snprintf(buffer, sizeof buffer, "%.*e", significant_digits - 1, value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

void write_table(const Table& table, std::ostream& out, int significant_digits) {
  std::string text;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) text += ',';
    text += table.columns[c];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("table row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += format_scientific(row[c], significant_digits);
    }
    text += '\n';
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed to write table");
}

void write_table(const Table& table, const std::filesystem::path& path, int significant_digits) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  try {
    write_table(table, out, significant_digits);
    out.flush();
    if (!out) throw IoError("write failed");
  } catch (const IoError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split_fields(line);
    if (!have_header) {
      for (auto& f : fields) table.columns.push_back(trim(f));
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw IoError("line " + std::to_string(line_number) + ": expected " +
                    std::to_string(table.columns.size()) + " fields, found " +
                    std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_number(f, line_number));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw IoError("missing CSV header");
  return table;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_table(in);
  } catch (const IoError& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace photodetach
