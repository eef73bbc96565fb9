#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace liquid::cli {

// Exit codes of the command-line contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumerical = 4;

struct FitArgs {
  std::string spec;
  std::string data;
  std::string out;  // output directory, created when missing
};

struct ValidateArgs {
  std::string spec;
  std::string data;
  std::string coeffs;
  bool json = false;
};

struct PlotArgs {
  std::string spec;
  std::string coeffs;
  std::string out;
  int points = 100;
};

struct BasisArgs {
  std::string knots;  // comma-separated
  int order = 4;
  int points = 101;
  std::string out;  // empty or "-" writes to `out`
};

struct GenArgs {
  std::string config;
  std::string out;  // empty or "-" writes to `out`
};

// Each command throws liquid::Error on failure. `out` receives data written
// to standard output, `log` receives progress and warnings.
void cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& log);
void cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& log);
void cmd_plot(const PlotArgs& args, std::ostream& out, std::ostream& log);
void cmd_basis(const BasisArgs& args, std::ostream& out, std::ostream& log);
void cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& log);

// Parses `args` (without the program name), runs the selected command and
// maps failures onto the exit codes above.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liquid::cli
