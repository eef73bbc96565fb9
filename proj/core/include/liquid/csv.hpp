#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liquid/scorecard.hpp"
#include "liquid/table.hpp"

// Comma-separated files: mandatory header, '.' decimal point, no thousands
// separators. Numbers are written in shortest round-trip form.
namespace liquid::io {

std::string format_number(double v);

// Splits one CSV record; double quotes may wrap fields containing commas.
std::vector<std::string> split_csv_line(const std::string& line);
std::string quote_csv_field(const std::string& field);

Table read_table(std::istream& in, const std::string& source = "<stream>");
Table read_table_file(const std::string& path);
void write_table(std::ostream& out, const Table& table);

struct CoefficientRow {
  int index = 0;  // 1-based
  std::string characteristic;
  std::string label;
  double raw = 0.0;
  double woe = 0.0;
};

void write_coefficients(std::ostream& out, const scorecard::CoefficientLayout& layout,
                        const Eigen::VectorXd& raw, const Eigen::VectorXd& woe);
std::vector<CoefficientRow> read_coefficients(std::istream& in,
                                              const std::string& source = "<stream>");
std::vector<CoefficientRow> read_coefficients_file(const std::string& path);

// Columns x_step,y_step,x_liquid,y_liquid; step columns are left empty when
// the series has no traditional trace.
void write_plot_series(std::ostream& out, const scorecard::PlotSeries& series);

}  // namespace liquid::io
