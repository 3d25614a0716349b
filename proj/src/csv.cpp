#include "mmreg/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mmreg/errors.hpp"

namespace mmreg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(unquote(trim(field)));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw DataError("non-numeric cell '" + cell + "' at data row " +
                    std::to_string(row) + ", column '" + column + "'");
  return value;
}

}  // namespace

std::vector<std::string> split_list(const std::string& csv_list) {
  std::vector<std::string> out;
  for (const auto& tok : split_line(csv_list))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw DataError("empty input file (no header row): " + path);
  table.header = split_line(line);
  table.columns.resize(table.header.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_line(line);
    if (fields.size() != table.header.size())
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    for (std::size_t j = 0; j < fields.size(); ++j)
      table.columns[j].push_back(parse_cell(fields[j], row, table.header[j]));
  }
  if (row == 0) throw DataError("input file has no data rows: " + path);
  table.rows = row;
  return table;
}

namespace {

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end())
    throw UsageError("column '" + name + "' not found in input header");
  return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

Dataset dataset_from_csv(const CsvTable& table,
                         const std::vector<std::string>& response_cols,
                         const std::vector<std::string>& predictor_cols,
                         bool intercept) {
  if (response_cols.empty() || predictor_cols.empty())
    throw UsageError("response and predictor column lists must be nonempty");
  for (const auto& r : response_cols)
    if (std::find(predictor_cols.begin(), predictor_cols.end(), r) !=
        predictor_cols.end())
      throw UsageError("column '" + r + "' listed as both response and predictor");

  const auto n = static_cast<Index>(table.rows);
  const auto q = static_cast<Index>(response_cols.size());
  const auto p = static_cast<Index>(predictor_cols.size()) + (intercept ? 1 : 0);

  Matrix X(n, p), Y(n, q);
  for (Index j = 0; j < q; ++j) {
    const auto& col = table.columns[column_index(table, response_cols[j])];
    for (Index i = 0; i < n; ++i) Y(i, j) = col[static_cast<std::size_t>(i)];
  }
  for (std::size_t j = 0; j < predictor_cols.size(); ++j) {
    const auto& col = table.columns[column_index(table, predictor_cols[j])];
    for (Index i = 0; i < n; ++i)
      X(i, static_cast<Index>(j)) = col[static_cast<std::size_t>(i)];
  }
  if (intercept) X.col(p - 1).setOnes();
  return Dataset(std::move(X), std::move(Y));
}

}  // namespace mmreg
