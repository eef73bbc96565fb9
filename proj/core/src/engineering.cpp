#include "liquid/engineering.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "liquid/error.hpp"

namespace liquid::engineering {
namespace {

constexpr const char* kStage = "engineering";

void check_index(int index, int p, const char* what) {
  if (index < 0 || index >= p) {
    throw_invalid(kStage, std::string(what) + " index " + std::to_string(index) +
                              " outside 0.." + std::to_string(p - 1));
  }
}

double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd inweight_rows(std::span<const int> indices, int p) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(indices.size()), p);
  std::set<int> seen;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    check_index(indices[i], p, "in-weight");
    if (!seen.insert(indices[i]).second) {
      throw_invalid(kStage, "duplicate in-weight index " + std::to_string(indices[i]));
    }
    rows(static_cast<Eigen::Index>(i), indices[i]) = 1.0;
  }
  return rows;
}

Eigen::MatrixXd cross_rows(std::span<const Cross> pairs, int p) {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairs.size()), p);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    check_index(pairs[i].a, p, "cross");
    check_index(pairs[i].b, p, "cross");
    if (pairs[i].a == pairs[i].b) {
      throw_invalid(kStage, "cross restriction ties index " + std::to_string(pairs[i].a) +
                                " to itself");
    }
    rows(static_cast<Eigen::Index>(i), pairs[i].a) = 1.0;
    rows(static_cast<Eigen::Index>(i), pairs[i].b) = -1.0;
  }
  return rows;
}

Eigen::MatrixXd centering_rows(const std::vector<std::vector<int>>& groups,
                               const Eigen::VectorXd& e) {
  const auto p = static_cast<int>(e.size());
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups.size()), p);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int j : groups[g]) {
      check_index(j, p, "centering");
      rows(static_cast<Eigen::Index>(g), j) = e(j);
    }
  }
  return rows;
}

Eigen::MatrixXd pattern_rows(std::span<const int> left, std::span<const int> right,
                             std::span<const bool> is_less_than, int p) {
  if (left.size() != right.size() || left.size() != is_less_than.size()) {
    throw_invalid(kStage, "pattern left/right/flag lengths differ");
  }
  std::vector<Pattern> patterns;
  for (std::size_t i = 0; i < left.size(); ++i) {
    patterns.push_back(
        {left[i], right[i], is_less_than[i] ? Relation::kLess : Relation::kGreater});
  }
  return pattern_rows(patterns, p);
}

Eigen::MatrixXd pattern_rows(std::span<const Pattern> patterns, int p) {
  Eigen::MatrixXd rows =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(patterns.size()), p);
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const Pattern& pat = patterns[i];
    check_index(pat.left, p, "pattern");
    check_index(pat.right, p, "pattern");
    if (!(pat.left < pat.right)) {
      throw_invalid(kStage, "pattern " + std::to_string(i) + " needs left < right (got " +
                                std::to_string(pat.left) + ", " +
                                std::to_string(pat.right) + ")");
    }
    const double c = pat.relation == Relation::kLess ? 1.0 : -1.0;
    rows(static_cast<Eigen::Index>(i), pat.left) = c;
    rows(static_cast<Eigen::Index>(i), pat.right) = -c;
  }
  return rows;
}

ConstraintMatrices assemble(const divstats::DivStats& stats,
                            const ConstraintSet& constraints) {
  const auto p = static_cast<int>(stats.d.size());
  if (stats.e.size() != p || stats.C.rows() != p) {
    throw_invalid(kStage, "inconsistent divergence statistics dimensions");
  }
  std::vector<int> iw;
  for (const InWeight& w : constraints.inweights) iw.push_back(w.index);

  const Eigen::MatrixXd iw_rows = inweight_rows(iw, p);
  const Eigen::MatrixXd cr_rows = cross_rows(constraints.crosses, p);
  const Eigen::MatrixXd ce_rows = centering_rows(constraints.centering_groups, stats.e);

  ConstraintMatrices out;
  out.num_inweights = static_cast<int>(iw_rows.rows());
  out.num_crosses = static_cast<int>(cr_rows.rows());
  out.num_centering = static_cast<int>(ce_rows.rows());
  const Eigen::Index m_eq = 1 + iw_rows.rows() + cr_rows.rows() + ce_rows.rows();

  out.Aeq.resize(m_eq, p);
  out.Aeq << stats.d.transpose(), iw_rows, cr_rows, ce_rows;
  out.beq = Eigen::VectorXd::Zero(m_eq);
  out.beq(0) = constraints.delta;
  for (std::size_t i = 0; i < constraints.inweights.size(); ++i) {
    out.beq(out.inweight_begin() + static_cast<Eigen::Index>(i)) =
        constraints.inweights[i].value;
  }
  out.A = pattern_rows(constraints.patterns, p);
  out.b = Eigen::VectorXd::Zero(out.A.rows());
  return out;
}

ConstraintSet decode(const ConstraintMatrices& mx) {
  ConstraintSet out;
  out.delta = mx.beq(0);
  const Eigen::Index p = mx.Aeq.cols();
  auto nonzeros = [p](const Eigen::MatrixXd& M, Eigen::Index r) {
    std::vector<int> idx;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (M(r, j) != 0.0) idx.push_back(static_cast<int>(j));
    }
    return idx;
  };
  for (int i = 0; i < mx.num_inweights; ++i) {
    const Eigen::Index r = mx.inweight_begin() + i;
    const auto idx = nonzeros(mx.Aeq, r);
    out.inweights.push_back({idx.at(0), mx.beq(r)});
  }
  for (int i = 0; i < mx.num_crosses; ++i) {
    const Eigen::Index r = mx.cross_begin() + i;
    const auto idx = nonzeros(mx.Aeq, r);
    Cross c{idx.at(0), idx.at(1)};
    if (mx.Aeq(r, c.a) < 0.0) std::swap(c.a, c.b);
    out.crosses.push_back(c);
  }
  for (int i = 0; i < mx.num_centering; ++i) {
    out.centering_groups.push_back(nonzeros(mx.Aeq, mx.centering_begin() + i));
  }
  for (Eigen::Index r = 0; r < mx.A.rows(); ++r) {
    const auto idx = nonzeros(mx.A, r);
    const Relation rel = mx.A(r, idx.at(0)) > 0.0 ? Relation::kLess : Relation::kGreater;
    out.patterns.push_back({idx.at(0), idx.at(1), rel});
  }
  return out;
}

double Residuals::max() const {
  return std::max({divergence, inweight, cross, centering, pattern});
}

Residuals residuals(const ConstraintMatrices& mx, const Eigen::VectorXd& S) {
  if (S.size() != mx.Aeq.cols()) {
    throw_invalid(kStage, "coefficient vector length does not match constraints");
  }
  const Eigen::VectorXd eq = mx.Aeq * S - mx.beq;
  Residuals r;
  r.divergence = std::abs(eq(0));
  r.inweight = max_abs(eq.segment(mx.inweight_begin(), mx.num_inweights));
  r.cross = max_abs(eq.segment(mx.cross_begin(), mx.num_crosses));
  r.centering = max_abs(eq.segment(mx.centering_begin(), mx.num_centering));
  if (mx.A.rows() > 0) {
    r.pattern = std::max(0.0, (mx.A * S - mx.b).maxCoeff());
  }
  return r;
}

}  // namespace liquid::engineering
