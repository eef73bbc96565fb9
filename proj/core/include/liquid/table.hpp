#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace liquid {

// Column-major numeric table with a named header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  std::size_t cols() const { return header.size(); }

  // -1 when the column is absent.
  int find(const std::string& name) const;
  // Throws liquid::Error (invalid input) when the column is absent.
  const std::vector<double>& column(const std::string& name) const;

  void add_column(std::string name, std::vector<double> values);
};

}  // namespace liquid
