#include "clmbr/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace clmbr {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw ParseError("column '" + name + "' not found (available: " +
                     [this]() {
                       std::string all;
                       for (size_t i = 0; i < columns.size(); ++i)
                         all += (i ? ", " : "") + columns[i];
                       return all;
                     }() +
                     ")");
  return static_cast<int>(it - columns.begin());
}

CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  long lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (table.columns.empty()) {
      std::set<std::string> seen;
      for (const std::string& name : fields) {
        if (name.empty())
          throw ParseError(origin + ": empty column name in header", lineno);
        if (!seen.insert(name).second)
          throw ParseError(origin + ": duplicate column '" + name + "' in header",
                           lineno);
      }
      table.columns = fields;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw ParseError(origin + ": line " + std::to_string(lineno) + " has " +
                           std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(table.columns.size()),
                       lineno);
    std::vector<double> row(fields.size());
    for (size_t k = 0; k < fields.size(); ++k) {
      try {
        size_t used = 0;
        row[k] = std::stod(fields[k], &used);
        if (used != fields[k].size()) throw std::invalid_argument(fields[k]);
      } catch (const std::exception&) {
        throw ParseError(origin + ": line " + std::to_string(lineno) +
                             ", column '" + table.columns[k] +
                             "': cannot parse '" + fields[k] + "' as a number",
                         lineno);
      }
      if (!std::isfinite(row[k]))
        throw ParseError(origin + ": line " + std::to_string(lineno) +
                             ", column '" + table.columns[k] +
                             "': value must be finite",
                         lineno);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) throw ParseError(origin + ": missing header row");
  if (table.rows.empty()) throw ParseError(origin + ": no data rows");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

Dataset make_dataset(const CsvTable& table, const std::string& response,
                     const std::vector<std::string>& covariates) {
  const int yi = table.column_index(response);
  std::vector<int> xi;
  for (const std::string& name : covariates) {
    const int k = table.column_index(name);
    if (k == yi)
      throw ParseError("column '" + name + "' used as both response and covariate");
    if (std::count(xi.begin(), xi.end(), k) > 0)
      throw ParseError("covariate '" + name + "' listed twice");
    xi.push_back(k);
  }

  const int n = static_cast<int>(table.rows.size());
  std::vector<int> y(static_cast<size_t>(n));
  Eigen::MatrixXd X(n, static_cast<int>(xi.size()));
  int cmax = 0;
  for (int i = 0; i < n; ++i) {
    const double raw = table.rows[static_cast<size_t>(i)][static_cast<size_t>(yi)];
    if (std::fabs(raw - std::round(raw)) > 1e-9 || raw < 1.0)
      throw ParseError("response '" + response + "', data row " +
                       std::to_string(i + 1) + ": value " + std::to_string(raw) +
                       " is not a positive integer category");
    y[static_cast<size_t>(i)] = static_cast<int>(std::lround(raw));
    cmax = std::max(cmax, y[static_cast<size_t>(i)]);
    for (size_t k = 0; k < xi.size(); ++k)
      X(i, static_cast<int>(k)) =
          table.rows[static_cast<size_t>(i)][static_cast<size_t>(xi[k])];
  }

  std::set<int> seen(y.begin(), y.end());
  for (int j = 1; j <= cmax; ++j) {
    if (seen.count(j) == 0)
      throw ParseError("response '" + response + "': category " +
                       std::to_string(j) +
                       " never occurs; remap categories to consecutive "
                       "integers 1.." +
                       std::to_string(static_cast<int>(seen.size())));
  }
  if (cmax < 2)
    throw ParseError("response '" + response + "' needs at least 2 categories");
  return Dataset(std::move(X), std::move(y), cmax);
}

}  // namespace clmbr
