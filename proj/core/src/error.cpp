#include "liquid/error.hpp"

#include <utility>

namespace liquid {

Error::Error(ErrorKind kind, std::string stage, const std::string& what)
    : std::runtime_error(stage.empty() ? what : stage + ": " + what),
      kind_(kind),
      stage_(std::move(stage)) {}

void throw_invalid(const std::string& stage, const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, stage, what);
}

void throw_numerical(const std::string& stage, const std::string& what) {
  throw Error(ErrorKind::kNumerical, stage, what);
}

void throw_infeasible(const std::string& stage, const std::string& what) {
  throw Error(ErrorKind::kInfeasible, stage, what);
}

}  // namespace liquid
