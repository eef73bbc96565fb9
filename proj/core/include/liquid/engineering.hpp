#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "liquid/divstats.hpp"

// Score-engineering constraints as linear rows over the coefficient vector S.
// All indices are 0-based.
namespace liquid::engineering {

enum class Relation {
  kLess,     // S_left <= S_right
  kGreater,  // S_left >= S_right
};

struct InWeight {
  int index = 0;
  double value = 0.0;

  friend bool operator==(const InWeight&, const InWeight&) = default;
};

// S_a = S_b.
struct Cross {
  int a = 0;
  int b = 0;

  friend bool operator==(const Cross&, const Cross&) = default;
};

// Requires left < right.
struct Pattern {
  int left = 0;
  int right = 0;
  Relation relation = Relation::kLess;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct ConstraintSet {
  std::vector<InWeight> inweights;
  std::vector<Cross> crosses;
  std::vector<std::vector<int>> centering_groups;
  std::vector<Pattern> patterns;
  double delta = 1.0;
};

// Aeq rows are stacked as [d'; in-weights; crosses; centering]; A holds one
// row per pattern and b is always zero.
struct ConstraintMatrices {
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int num_inweights = 0;
  int num_crosses = 0;
  int num_centering = 0;

  int inweight_begin() const { return 1; }
  int cross_begin() const { return 1 + num_inweights; }
  int centering_begin() const { return 1 + num_inweights + num_crosses; }
};

Eigen::MatrixXd inweight_rows(std::span<const int> indices, int p);
Eigen::MatrixXd cross_rows(std::span<const Cross> pairs, int p);
Eigen::MatrixXd centering_rows(const std::vector<std::vector<int>>& groups,
                               const Eigen::VectorXd& e);

// Row i has c = 2*flag-1 at left(i) and -c at right(i), so A S <= 0 encodes
// S_left <= S_right when flag is set and S_left >= S_right otherwise.
Eigen::MatrixXd pattern_rows(std::span<const int> left, std::span<const int> right,
                             std::span<const bool> is_less_than, int p);
Eigen::MatrixXd pattern_rows(std::span<const Pattern> patterns, int p);

ConstraintMatrices assemble(const divstats::DivStats& stats,
                            const ConstraintSet& constraints);

// Recovers the declarations from assembled rows. Centering members whose
// e(j) is exactly zero cannot be recovered and are dropped.
ConstraintSet decode(const ConstraintMatrices& matrices);

// Maximum absolute violation per constraint family at S.
struct Residuals {
  double divergence = 0.0;
  double inweight = 0.0;
  double cross = 0.0;
  double centering = 0.0;
  double pattern = 0.0;  // max(0, A S - b)

  double max() const;
};

Residuals residuals(const ConstraintMatrices& matrices, const Eigen::VectorXd& S);

}  // namespace liquid::engineering
