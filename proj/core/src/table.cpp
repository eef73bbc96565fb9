#include "liquid/table.hpp"

#include <algorithm>

#include "liquid/error.hpp"

namespace liquid {

int Table::find(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

const std::vector<double>& Table::column(const std::string& name) const {
  const int i = find(name);
  if (i < 0) throw_invalid("data", "no column named '" + name + "'");
  return columns[static_cast<std::size_t>(i)];
}

void Table::add_column(std::string name, std::vector<double> values) {
  if (find(name) >= 0) throw_invalid("data", "duplicate column '" + name + "'");
  if (!columns.empty() && values.size() != rows()) {
    throw_invalid("data", "column '" + name + "' has the wrong length");
  }
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

}  // namespace liquid
