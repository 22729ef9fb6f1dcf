#pragma once

#include <string>
#include <vector>

#include "clmbr/errors.hpp"
#include "clmbr/model.hpp"

namespace clmbr {

// A parsed numeric CSV: a header row of unique column names followed by
// all-numeric data rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // throws ParseError
};

// Reads a comma-separated file with a header row; throws ParseError naming
// the offending line and column on malformed input.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin);

// Assembles a Dataset from named columns. The response must hold integers
// covering 1..c consecutively; gaps are rejected with a remapping hint.
Dataset make_dataset(const CsvTable& table, const std::string& response,
                     const std::vector<std::string>& covariates);

}  // namespace clmbr
