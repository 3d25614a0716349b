#pragma once

#include <string>
#include <vector>

#include "mmreg/types.hpp"

namespace mmreg {

/// A parsed CSV file: header names plus numeric columns.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // one vector per header entry
  std::size_t rows = 0;
};

/// Parse an RFC-4180-style CSV file (header row, '.' decimal separator).
/// Non-numeric cells are reported with their row and column.
CsvTable read_csv(const std::string& path);

/// Assemble a Dataset from named response and predictor columns; with
/// intercept set, a constant-1 predictor column is appended.
Dataset dataset_from_csv(const CsvTable& table,
                         const std::vector<std::string>& response_cols,
                         const std::vector<std::string>& predictor_cols,
                         bool intercept);

/// Split "a,b,c" into trimmed tokens.
std::vector<std::string> split_list(const std::string& csv_list);

}  // namespace mmreg
