#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Dense convex quadratic programming:
//
//   minimize    1/2 x'Hx + f'x
//   subject to  Aeq x = beq,  A x <= b,  lower <= x <= upper
//
// H must be symmetric positive semidefinite. Empty constraint blocks may be
// given as 0-row matrices (or left default-constructed).
namespace liquid::qp {

enum class Status { kOptimal, kInfeasible, kMaxIter };

std::string to_string(Status status);

struct Problem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::VectorXd lower;  // empty means -inf everywhere
  Eigen::VectorXd upper;  // empty means +inf everywhere
  std::optional<Eigen::VectorXd> start;

  int dimension() const { return static_cast<int>(H.rows()); }
};

struct Options {
  int max_iter = 0;             // 0 selects 50 (p + number of inequalities)
  double feasibility_tol = 1e-8;
  double ridge = 1e-10;         // added to the reduced Hessian factorization only
  double rank_tol = 1e-10;      // redundant equality detection
  double psd_tol = 1e-8;        // smallest eigenvalue accepted for H
};

struct Solution {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;     // one per Aeq row (0 for redundant rows)
  Eigen::VectorXd ineq_multipliers;   // one per A row, >= 0
  Eigen::VectorXd lower_multipliers;  // >= 0, zero where the bound is infinite
  Eigen::VectorXd upper_multipliers;
  Status status = Status::kInfeasible;
  int iterations = 0;
  int phase1_iterations = 0;
  double objective = 0.0;
  bool started_from_supplied_point = false;
};

// Primal active-set solve. Starts from `problem.start` when it is feasible
// (after projection onto the equality constraints) and from a phase-1 point
// otherwise. Returns status kInfeasible instead of throwing when no feasible
// point exists; throws liquid::Error on malformed input or a non-PSD H.
Solution solve(const Problem& problem, const Options& options = {});

// A point satisfying every constraint within options.feasibility_tol.
// Throws liquid::Error (infeasible) when none exists.
Eigen::VectorXd feasible_start(const Problem& problem, const Options& options = {});

struct KktReport {
  double equality_residual = 0.0;    // max |Aeq x - beq|
  double inequality_residual = 0.0;  // max(0, A x - b, lower - x, x - upper)
  double stationarity = 0.0;         // max |Hx + f + A'mu + Aeq'lambda - mu_l + mu_u|
  double complementarity = 0.0;      // max |mu_i * slack_i|
  double dual_infeasibility = 0.0;   // max(0, -mu)
  std::vector<int> active_inequalities;  // A rows with |A x - b| <= 1e-8
  std::vector<int> active_lower;
  std::vector<int> active_upper;

  // Tolerances of the solver contract: 1e-8 primal, 1e-6 dual.
  bool passes(double primal_tol = 1e-8, double dual_tol = 1e-6) const;
};

KktReport kkt_report(const Problem& problem, const Solution& solution);

double objective(const Problem& problem, const Eigen::VectorXd& x);

}  // namespace liquid::qp
