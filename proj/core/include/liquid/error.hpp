#pragma once

#include <stdexcept>
#include <string>

namespace liquid {

// Failure classes. The CLI maps these onto its exit-code contract.
enum class ErrorKind {
  kInvalidInput,  // bad arguments, schema or data problems
  kInfeasible,    // constraint set has no feasible point
  kNumerical,     // iteration cap, zero variance, singular systems
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

[[noreturn]] void throw_invalid(const std::string& stage, const std::string& what);
[[noreturn]] void throw_numerical(const std::string& stage, const std::string& what);
[[noreturn]] void throw_infeasible(const std::string& stage, const std::string& what);

}  // namespace liquid
