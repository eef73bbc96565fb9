#include "liquid/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "liquid/error.hpp"

namespace liquid::qp {
namespace {

constexpr const char* kStage = "qp";

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

Eigen::MatrixXd rows_or_empty(const Eigen::MatrixXd& M, int n) {
  if (M.rows() == 0) return Eigen::MatrixXd(0, n);
  return M;
}

// The problem after validation: equalities reduced to independent rows and
// bounds folded into the inequality block G z <= h (A rows first).
struct Reduced {
  int n = 0;
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd E;
  Eigen::VectorXd e;
  std::vector<int> kept_eq;  // original Aeq row of each E row
  Eigen::MatrixXd Aeq_all;
  Eigen::VectorXd beq_all;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  int num_A = 0;
  std::vector<int> bound_var;
  std::vector<bool> bound_upper;
};

Reduced reduce(const Problem& pr, const Options& opt) {
  Reduced r;
  r.n = pr.dimension();
  const int n = r.n;
  if (n < 1) throw_invalid(kStage, "problem has no variables");
  if (pr.H.cols() != n) throw_invalid(kStage, "H must be square");
  if (pr.f.size() != n) throw_invalid(kStage, "f length does not match H");
  if (!pr.H.allFinite() || !pr.f.allFinite()) throw_invalid(kStage, "H and f must be finite");

  const double hmax = std::max(1.0, pr.H.cwiseAbs().maxCoeff());
  if ((pr.H - pr.H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * hmax) {
    throw_invalid(kStage, "H is not symmetric");
  }
  r.H = 0.5 * (pr.H + pr.H.transpose());
  r.f = pr.f;
  {
    Eigen::MatrixXd shifted = r.H;
    shifted.diagonal().array() += opt.psd_tol * hmax;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
      throw_invalid(kStage, "H is not positive semidefinite");
    }
  }

  const Eigen::MatrixXd A = rows_or_empty(pr.A, n);
  const Eigen::MatrixXd Aeq = rows_or_empty(pr.Aeq, n);
  if (A.cols() != n || pr.b.size() != A.rows()) {
    throw_invalid(kStage, "A/b dimensions inconsistent");
  }
  if (Aeq.cols() != n || pr.beq.size() != Aeq.rows()) {
    throw_invalid(kStage, "Aeq/beq dimensions inconsistent");
  }
  if (!A.allFinite() || !pr.b.allFinite() || !Aeq.allFinite() || !pr.beq.allFinite()) {
    throw_invalid(kStage, "constraint data must be finite");
  }
  r.Aeq_all = Aeq;
  r.beq_all = pr.beq;

  // Independent equality rows via column-pivoted QR of Aeq'.
  if (Aeq.rows() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aeq.transpose());
    qr.setThreshold(opt.rank_tol);
    const Eigen::Index rank = qr.rank();
    for (Eigen::Index i = 0; i < rank; ++i) {
      r.kept_eq.push_back(static_cast<int>(qr.colsPermutation().indices()(i)));
    }
    std::sort(r.kept_eq.begin(), r.kept_eq.end());
  }
  r.E.resize(static_cast<Eigen::Index>(r.kept_eq.size()), n);
  r.e.resize(static_cast<Eigen::Index>(r.kept_eq.size()));
  for (std::size_t i = 0; i < r.kept_eq.size(); ++i) {
    r.E.row(static_cast<Eigen::Index>(i)) = Aeq.row(r.kept_eq[i]);
    r.e(static_cast<Eigen::Index>(i)) = pr.beq(r.kept_eq[i]);
  }

  const bool has_lower = pr.lower.size() > 0;
  const bool has_upper = pr.upper.size() > 0;
  if ((has_lower && pr.lower.size() != n) || (has_upper && pr.upper.size() != n)) {
    throw_invalid(kStage, "bound vectors must have length p");
  }
  for (int i = 0; i < n; ++i) {
    const double lo = has_lower ? pr.lower(i) : -std::numeric_limits<double>::infinity();
    const double hi = has_upper ? pr.upper(i) : std::numeric_limits<double>::infinity();
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
      throw_invalid(kStage, "bounds must satisfy lower <= upper");
    }
    if (std::isfinite(lo)) {
      r.bound_var.push_back(i);
      r.bound_upper.push_back(false);
    }
    if (std::isfinite(hi)) {
      r.bound_var.push_back(i);
      r.bound_upper.push_back(true);
    }
  }
  r.num_A = static_cast<int>(A.rows());
  const auto m_i = static_cast<Eigen::Index>(r.num_A + r.bound_var.size());
  r.G = Eigen::MatrixXd::Zero(m_i, n);
  r.h = Eigen::VectorXd::Zero(m_i);
  r.G.topRows(r.num_A) = A;
  r.h.head(r.num_A) = pr.b;
  for (std::size_t k = 0; k < r.bound_var.size(); ++k) {
    const Eigen::Index row = r.num_A + static_cast<Eigen::Index>(k);
    const int v = r.bound_var[k];
    if (r.bound_upper[k]) {
      r.G(row, v) = 1.0;
      r.h(row) = pr.upper(v);
    } else {
      r.G(row, v) = -1.0;
      r.h(row) = -pr.lower(v);
    }
  }
  return r;
}

struct CoreResult {
  Eigen::VectorXd z;
  Eigen::VectorXd eq_mult;
  Eigen::VectorXd ineq_mult;
  int iterations = 0;
  bool converged = false;
};

// Primal active-set iterations from a feasible z (within tolerance).
// Working set: all rows of E plus a subset of G rows held as equalities.
CoreResult active_set(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                      const Eigen::MatrixXd& E, const Eigen::MatrixXd& G,
                      const Eigen::VectorXd& h, Eigen::VectorXd z, int max_iter,
                      double ridge) {
  const auto n = static_cast<int>(z.size());
  const auto me = static_cast<int>(E.rows());
  const auto mi = static_cast<int>(G.rows());
  const double hscale = std::max(1.0, H.size() ? H.cwiseAbs().maxCoeff() : 0.0);
  const double rho = ridge * hscale;

  Eigen::VectorXd row_norm(mi);
  for (int i = 0; i < mi; ++i) row_norm(i) = inf_norm(G.row(i).transpose());

  std::vector<int> working;
  std::vector<char> in_working(static_cast<std::size_t>(mi), 0);
  int degenerate_run = 0;

  CoreResult out;
  out.eq_mult = Eigen::VectorXd::Zero(me);
  out.ineq_mult = Eigen::VectorXd::Zero(mi);

  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter + 1;
    const bool bland = degenerate_run > 2 * n;
    const int k = me + static_cast<int>(working.size());
    Eigen::MatrixXd Mt(n, k);  // columns are the working constraint normals
    if (me > 0) Mt.leftCols(me) = E.transpose();
    for (std::size_t w = 0; w < working.size(); ++w) {
      Mt.col(me + static_cast<Eigen::Index>(w)) = G.row(working[w]).transpose();
    }
    const Eigen::VectorXd g = H * z + f;
    const double gscale = 1.0 + inf_norm(g);

    Eigen::HouseholderQR<Eigen::MatrixXd> qr;
    Eigen::MatrixXd Q;
    if (k > 0) {
      qr.compute(Mt);
      Q = qr.householderQ();
    }
    const int nz = std::max(0, n - k);
    Eigen::MatrixXd Z = k > 0 ? Eigen::MatrixXd(Q.rightCols(nz))
                              : Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd rg = Z.transpose() * g;

    if (nz == 0 || inf_norm(rg) <= 1e-11 * gscale) {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
      if (k > 0) {
        const Eigen::VectorXd rhs = (Q.transpose() * (-g)).head(k);
        y = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(rhs);
      }
      int drop = -1;
      double most_negative = -1e-10 * gscale;
      for (std::size_t w = 0; w < working.size(); ++w) {
        const double mu = y(me + static_cast<Eigen::Index>(w));
        if (bland) {
          if (mu < -1e-10 * gscale &&
              (drop < 0 || working[w] < working[static_cast<std::size_t>(drop)])) {
            drop = static_cast<int>(w);
          }
        } else if (mu < most_negative ||
                   (drop >= 0 && mu == most_negative &&
                    working[w] < working[static_cast<std::size_t>(drop)])) {
          most_negative = mu;
          drop = static_cast<int>(w);
        }
      }
      if (drop < 0) {
        out.eq_mult = y.head(me);
        for (std::size_t w = 0; w < working.size(); ++w) {
          out.ineq_mult(working[w]) = std::max(0.0, y(me + static_cast<Eigen::Index>(w)));
        }
        out.z = z;
        out.converged = true;
        return out;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
      working.erase(working.begin() + drop);
      continue;
    }

    Eigen::MatrixXd reduced_h = Z.transpose() * H * Z;
    reduced_h.diagonal().array() += rho;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced_h);
    const Eigen::VectorXd pz = ldlt.solve(-rg);
    const Eigen::VectorXd p = Z * pz;
    const double pnorm = inf_norm(p);
    if (!p.allFinite()) throw_numerical(kStage, "non-finite search direction");

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < mi; ++i) {
      if (in_working[static_cast<std::size_t>(i)]) continue;
      const double gp = G.row(i).dot(p);
      if (gp <= 1e-12 * row_norm(i) * pnorm) continue;
      const double slack = std::max(0.0, h(i) - G.row(i).dot(z));
      const double a = slack / gp;
      if (a < alpha) {
        alpha = a;
        blocking = i;
      }
    }
    // rho * pz is the part of the reduced gradient left over by the curvature.
    const double unexplained = rho * inf_norm(pz);
    const bool flat = unexplained > 1e-3 * inf_norm(rg) && unexplained > 1e-9 * gscale;
    if (blocking < 0 && (flat || pnorm > 1e12 * (1.0 + inf_norm(z)))) {
      throw_numerical(kStage, "objective unbounded below on the feasible set");
    }
    z += alpha * p;
    degenerate_run = (alpha == 0.0) ? degenerate_run + 1 : 0;
    if (blocking >= 0) {
      working.push_back(blocking);
      in_working[static_cast<std::size_t>(blocking)] = 1;
    }
  }
  out.z = z;
  return out;
}

// Minimum-norm correction onto {x : E x = e}; E has full row rank.
Eigen::VectorXd project_equalities(const Reduced& r, Eigen::VectorXd x) {
  if (r.E.rows() == 0) return x;
  const Eigen::VectorXd resid = r.e - r.E * x;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(r.E);
  x += cod.solve(resid);
  return x;
}

double max_violation(const Reduced& r, const Eigen::VectorXd& x) {
  if (r.G.rows() == 0) return 0.0;
  return std::max(0.0, (r.G * x - r.h).maxCoeff());
}

double equality_violation(const Reduced& r, const Eigen::VectorXd& x) {
  if (r.Aeq_all.rows() == 0) return 0.0;
  return inf_norm(r.Aeq_all * x - r.beq_all);
}

struct StartPoint {
  Eigen::VectorXd x;
  bool feasible = false;
  bool from_supplied = false;
  int phase1_iterations = 0;
};

// Phase 1: minimize 1/2 t^2 + t over (x, t) with G x - t <= h, t >= 0 and
// E x = e, starting from the projected point with t at its max violation.
StartPoint find_start(const Problem& pr, const Reduced& r, const Options& opt) {
  const int n = r.n;
  StartPoint sp;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  if (pr.start) {
    if (pr.start->size() != n) throw_invalid(kStage, "start point length does not match p");
    if (!pr.start->allFinite()) throw_invalid(kStage, "start point must be finite");
    x0 = *pr.start;
  }
  x0 = project_equalities(r, x0);
  sp.x = x0;
  if (equality_violation(r, x0) > opt.feasibility_tol) {
    return sp;  // inconsistent equalities
  }
  const double viol = max_violation(r, x0);
  if (viol <= opt.feasibility_tol) {
    sp.feasible = true;
    sp.from_supplied = pr.start.has_value();
    return sp;
  }

  const auto mi = r.G.rows();
  Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(n + 1, n + 1);
  H1(n, n) = 1.0;
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(n + 1);
  f1(n) = 1.0;
  Eigen::MatrixXd E1 = Eigen::MatrixXd::Zero(r.E.rows(), n + 1);
  E1.leftCols(n) = r.E;
  Eigen::MatrixXd G1 = Eigen::MatrixXd::Zero(mi + 1, n + 1);
  G1.topLeftCorner(mi, n) = r.G;
  G1.col(n).head(mi).setConstant(-1.0);
  G1(mi, n) = -1.0;
  Eigen::VectorXd h1 = Eigen::VectorXd::Zero(mi + 1);
  h1.head(mi) = r.h;
  Eigen::VectorXd z0(n + 1);
  z0 << x0, viol;

  const int cap = 50 * (n + 1 + static_cast<int>(mi) + 1);
  const CoreResult res = active_set(H1, f1, E1, G1, h1, z0, cap, opt.ridge);
  sp.phase1_iterations = res.iterations;
  sp.x = res.z.head(n);
  sp.feasible = max_violation(r, sp.x) <= opt.feasibility_tol &&
                equality_violation(r, sp.x) <= opt.feasibility_tol;
  return sp;
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "OPTIMAL";
    case Status::kInfeasible: return "INFEASIBLE";
    case Status::kMaxIter: return "MAX_ITER";
  }
  return "UNKNOWN";
}

double objective(const Problem& problem, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(problem.H * x) + problem.f.dot(x);
}

Solution solve(const Problem& problem, const Options& options) {
  const Reduced r = reduce(problem, options);
  const int n = r.n;
  Solution sol;
  sol.eq_multipliers = Eigen::VectorXd::Zero(r.Aeq_all.rows());
  sol.ineq_multipliers = Eigen::VectorXd::Zero(r.num_A);
  sol.lower_multipliers = Eigen::VectorXd::Zero(n);
  sol.upper_multipliers = Eigen::VectorXd::Zero(n);

  const StartPoint sp = find_start(problem, r, options);
  sol.phase1_iterations = sp.phase1_iterations;
  sol.x = sp.x;
  if (!sp.feasible) {
    sol.status = Status::kInfeasible;
    sol.objective = objective(problem, sol.x);
    return sol;
  }
  sol.started_from_supplied_point = sp.from_supplied;

  const int cap = options.max_iter > 0
                      ? options.max_iter
                      : 50 * (n + static_cast<int>(r.G.rows()));
  const CoreResult res = active_set(r.H, r.f, r.E, r.G, r.h, sp.x, cap, options.ridge);
  sol.x = res.z;
  sol.iterations = res.iterations;
  sol.status = res.converged ? Status::kOptimal : Status::kMaxIter;
  sol.objective = objective(problem, sol.x);
  for (std::size_t i = 0; i < r.kept_eq.size(); ++i) {
    sol.eq_multipliers(r.kept_eq[i]) = res.eq_mult(static_cast<Eigen::Index>(i));
  }
  sol.ineq_multipliers = res.ineq_mult.head(r.num_A);
  for (std::size_t k = 0; k < r.bound_var.size(); ++k) {
    const double mu = res.ineq_mult(r.num_A + static_cast<Eigen::Index>(k));
    (r.bound_upper[k] ? sol.upper_multipliers : sol.lower_multipliers)(r.bound_var[k]) = mu;
  }
  return sol;
}

Eigen::VectorXd feasible_start(const Problem& problem, const Options& options) {
  const Reduced r = reduce(problem, options);
  const StartPoint sp = find_start(problem, r, options);
  if (!sp.feasible) {
    throw_infeasible(kStage, "no point satisfies the constraints within " +
                                 std::to_string(options.feasibility_tol));
  }
  return sp.x;
}

bool KktReport::passes(double primal_tol, double dual_tol) const {
  return equality_residual <= primal_tol && inequality_residual <= primal_tol &&
         stationarity <= dual_tol && complementarity <= dual_tol &&
         dual_infeasibility <= dual_tol;
}

KktReport kkt_report(const Problem& problem, const Solution& s) {
  const int n = problem.dimension();
  const Eigen::MatrixXd A = rows_or_empty(problem.A, n);
  const Eigen::MatrixXd Aeq = rows_or_empty(problem.Aeq, n);
  if (s.x.size() != n || s.eq_multipliers.size() != Aeq.rows() ||
      s.ineq_multipliers.size() != A.rows() || s.lower_multipliers.size() != n ||
      s.upper_multipliers.size() != n) {
    throw_invalid(kStage, "solution dimensions do not match the problem");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd lower =
      problem.lower.size() ? problem.lower : Eigen::VectorXd::Constant(n, -inf);
  const Eigen::VectorXd upper =
      problem.upper.size() ? problem.upper : Eigen::VectorXd::Constant(n, inf);

  KktReport rep;
  if (Aeq.rows() > 0) rep.equality_residual = inf_norm(Aeq * s.x - problem.beq);

  Eigen::VectorXd grad = problem.H * s.x + problem.f;
  if (A.rows() > 0) grad += A.transpose() * s.ineq_multipliers;
  if (Aeq.rows() > 0) grad += Aeq.transpose() * s.eq_multipliers;
  grad += s.upper_multipliers - s.lower_multipliers;
  rep.stationarity = inf_norm(grad);

  auto account = [&rep](double slack, double mu) {
    rep.inequality_residual = std::max(rep.inequality_residual, std::max(0.0, slack));
    rep.complementarity = std::max(rep.complementarity, std::abs(mu * slack));
    rep.dual_infeasibility = std::max(rep.dual_infeasibility, std::max(0.0, -mu));
  };
  if (A.rows() > 0) {
    const Eigen::VectorXd slack = A * s.x - problem.b;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      account(slack(i), s.ineq_multipliers(i));
      if (std::abs(slack(i)) <= 1e-8) rep.active_inequalities.push_back(static_cast<int>(i));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(lower(i))) {
      const double slack = lower(i) - s.x(i);
      account(slack, s.lower_multipliers(i));
      if (std::abs(slack) <= 1e-8) rep.active_lower.push_back(i);
    }
    if (std::isfinite(upper(i))) {
      const double slack = s.x(i) - upper(i);
      account(slack, s.upper_multipliers(i));
      if (std::abs(slack) <= 1e-8) rep.active_upper.push_back(i);
    }
  }
  return rep;
}

}  // namespace liquid::qp
