#include "liquid/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "liquid/error.hpp"

namespace liquid::io {
namespace {

constexpr const char* kStage = "csv";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& where) {
  const std::string t = trim(field);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last) {
    throw_invalid(kStage, where + ": '" + t + "' is not a number");
  }
  return v;
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_invalid(kStage, "cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (quoted) throw_invalid(kStage, "unterminated quoted field");
  fields.push_back(cur);
  return fields;
}

std::string quote_csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

Table read_table(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) break;
  }
  if (line_no == 0 || blank(line)) throw_invalid(kStage, source + ": empty data file");

  Table table;
  for (std::string& name : split_csv_line(line)) {
    table.header.push_back(trim(name));
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i].empty()) {
      throw_invalid(kStage, source + ": empty column name in header");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (table.header[k] == table.header[i]) {
        throw_invalid(kStage, source + ": duplicate column '" + table.header[i] + "'");
      }
    }
  }
  table.columns.assign(table.header.size(), {});
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    if (fields.size() != table.header.size()) {
      throw_invalid(kStage, where + ": expected " + std::to_string(table.header.size()) +
                                " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      table.columns[c].push_back(parse_number(fields[c], where));
    }
  }
  if (table.rows() == 0) throw_invalid(kStage, source + ": no data records");
  return table;
}

Table read_table_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_table(in, path);
}

void write_table(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.cols(); ++c) {
    out << (c ? "," : "") << quote_csv_field(table.header[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      out << (c ? "," : "") << format_number(table.columns[c][r]);
    }
    out << '\n';
  }
}

void write_coefficients(std::ostream& out, const scorecard::CoefficientLayout& layout,
                        const Eigen::VectorXd& raw, const Eigen::VectorXd& woe) {
  if (raw.size() != layout.size() || woe.size() != layout.size()) {
    throw_invalid(kStage, "coefficient vectors do not match the layout");
  }
  out << "index,characteristic,label,raw,woe\n";
  for (int j = 0; j < layout.size(); ++j) {
    const auto& col = layout.columns[static_cast<std::size_t>(j)];
    out << j + 1 << ',' << quote_csv_field(col.characteristic_name) << ','
        << quote_csv_field(col.label) << ',' << format_number(raw(j)) << ','
        << format_number(woe(j)) << '\n';
  }
}

std::vector<CoefficientRow> read_coefficients(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || blank(line)) {
    throw_invalid(kStage, source + ": empty coefficient file");
  }
  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> expected = {"index", "characteristic", "label", "raw", "woe"};
  if (header.size() != expected.size()) {
    throw_invalid(kStage, source + ": header must be index,characteristic,label,raw,woe");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (trim(header[i]) != expected[i]) {
      throw_invalid(kStage, source + ": header must be index,characteristic,label,raw,woe");
    }
  }
  std::vector<CoefficientRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != expected.size()) throw_invalid(kStage, where + ": expected 5 fields");
    CoefficientRow row;
    const double idx = parse_number(f[0], where);
    row.index = static_cast<int>(idx);
    if (row.index != idx || row.index != static_cast<int>(rows.size()) + 1) {
      throw_invalid(kStage, where + ": indices must run 1, 2, 3, ...");
    }
    row.characteristic = f[1];
    row.label = f[2];
    row.raw = parse_number(f[3], where);
    row.woe = parse_number(f[4], where);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CoefficientRow> read_coefficients_file(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_coefficients(in, path);
}

void write_plot_series(std::ostream& out, const scorecard::PlotSeries& s) {
  out << "x_step,y_step,x_liquid,y_liquid\n";
  const bool has_step = !s.x_step.empty();
  for (std::size_t i = 0; i < s.x_liquid.size(); ++i) {
    if (has_step) out << format_number(s.x_step[i]) << ',' << format_number(s.y_step[i]);
    else out << ',';
    out << ',' << format_number(s.x_liquid[i]) << ',' << format_number(s.y_liquid[i]) << '\n';
  }
}

}  // namespace liquid::io
