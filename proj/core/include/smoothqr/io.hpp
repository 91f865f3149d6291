#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "smoothqr/dataset.hpp"

namespace smoothqr {

/// Header row plus numeric body of a CSV file.
struct CsvTable {
  std::vector<std::string> headers;
  std::vector<std::vector<double>> rows;
};

/// Comma-separated, first row headers, every cell numeric. Blank lines are
/// skipped; surrounding whitespace and a trailing '\r' are ignored. Throws
/// ParseError naming the line and column of the first bad cell, a ragged row
/// or a duplicate header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

struct IngestedData {
  Dataset data;
  std::string response;
  std::vector<std::string> covariates;  // header order, response removed
};

/// The `response` column becomes y; the remaining columns, in header order,
/// become covariates behind a prepended intercept column. Throws ParseError
/// listing the available headers when `response` is absent.
IngestedData ingest_csv(std::istream& in, const std::string& response);
IngestedData ingest_csv_file(const std::string& path, const std::string& response);

/// Writes y then the covariates (intercept column dropped) with 17
/// significant digits, so ingest_csv reads back identical values.
void write_dataset_csv(std::ostream& out, const Vector& y, const RowMajorMatrix& covariates,
                       const std::string& response, const std::vector<std::string>& names);

/// Long-format plot row.
struct PlotRow {
  double x;
  std::string series;
  std::string metric;
  double value;
};

/// Header "x,series,metric,value" followed by one line per row, in order.
void emit_plot_data(std::ostream& out, const std::vector<PlotRow>& rows);

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double value);

}  // namespace smoothqr
