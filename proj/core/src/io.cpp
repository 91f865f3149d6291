#include "smoothqr/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "smoothqr/errors.hpp"

namespace smoothqr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& cell, double& value) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  value = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size() && errno != ERANGE && std::isfinite(value);
}

std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(trim(line));
    if (!have_header) {
      std::set<std::string> seen;
      for (const auto& h : cells) {
        if (h.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty header");
        if (!seen.insert(h).second) throw ParseError("duplicate header '" + h + "'");
      }
      table.headers = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.headers.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.headers.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c])) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) + " ('" +
                         table.headers[c] + "'): " + (cells[c].empty() ? "missing value" : "non-numeric value '" +
                                                                           cells[c] + "'"));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("empty CSV input");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  auto in = open_file(path);
  return read_csv(in);
}

IngestedData ingest_csv(std::istream& in, const std::string& response) {
  CsvTable table = read_csv(in);
  const auto it = std::find(table.headers.begin(), table.headers.end(), response);
  if (it == table.headers.end()) {
    std::string available;
    for (const auto& h : table.headers) available += (available.empty() ? "" : ", ") + h;
    throw ParseError("response column '" + response + "' not found; available: " + available);
  }
  if (table.rows.empty()) throw ParseError("CSV has a header but no data rows");
  const auto response_col = static_cast<std::size_t>(it - table.headers.begin());

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(table.headers.size());
  Vector y(n);
  RowMajorMatrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    Eigen::Index col = 1;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == response_col) y(i) = row[c];
      else x(i, col++) = row[c];
    }
  }
  std::vector<std::string> covariates;
  for (std::size_t c = 0; c < table.headers.size(); ++c) {
    if (c != response_col) covariates.push_back(table.headers[c]);
  }
  return IngestedData{Dataset::dense(std::move(y), std::move(x)), response, std::move(covariates)};
}

IngestedData ingest_csv_file(const std::string& path, const std::string& response) {
  auto in = open_file(path);
  return ingest_csv(in, response);
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_dataset_csv(std::ostream& out, const Vector& y, const RowMajorMatrix& covariates,
                       const std::string& response, const std::vector<std::string>& names) {
  if (covariates.rows() != y.size() ||
      static_cast<std::size_t>(covariates.cols()) != names.size()) {
    throw DimensionError("dataset columns and names do not match");
  }
  out << response;
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    out << format_double(y(i));
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) out << ',' << format_double(covariates(i, j));
    out << '\n';
  }
}

void emit_plot_data(std::ostream& out, const std::vector<PlotRow>& rows) {
  out << "x,series,metric,value\n";
  for (const auto& r : rows) {
    out << format_double(r.x) << ',' << r.series << ',' << r.metric << ',' << format_double(r.value)
        << '\n';
  }
}

}  // namespace smoothqr
