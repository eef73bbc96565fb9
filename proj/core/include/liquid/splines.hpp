#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace liquid::splines {

inline constexpr int kMaxOrder = 4;

// Strictly increasing list of at least two knots. Validated on construction.
class KnotVector {
 public:
  explicit KnotVector(std::vector<double> knots);

  int size() const noexcept { return static_cast<int>(knots_.size()); }
  double operator[](int i) const { return knots_[static_cast<std::size_t>(i)]; }
  double front() const noexcept { return knots_.front(); }
  double back() const noexcept { return knots_.back(); }
  const std::vector<double>& values() const noexcept { return knots_; }

  bool contains(double x) const noexcept { return x >= front() && x <= back(); }
  double clamp(double x) const noexcept;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  std::vector<double> knots_;
};

// The m+6 padded sequence: four copies of each end knot around the interior.
struct PaddedKnots {
  std::vector<double> t;
};

PaddedKnots pad_knots(const KnotVector& knots);

// Number of non-vacuous basis functions of the given order: m + order - 2.
int basis_count(int num_knots, int order);

// Non-vacuous basis functions of one order evaluated at a set of points.
//
// Column c of `values` is basis function number `first_index + c` in the
// combined layout where function i of order j sits at i + (m+2)(j-1)
// (1-based, four blocks of m+2 columns). That layout is what `full_basis`
// returns, so coefficient numbering from the combined layout can be
// reproduced exactly.
struct BasisBlock {
  int order = 4;
  Eigen::MatrixXd values;
  int first_index = 1;

  int columns() const { return static_cast<int>(values.cols()); }
  int combined_index(int column) const { return first_index + column; }
};

// Evaluates the order-`order` basis. Every x must lie in [k(1), k(m)].
// Throws liquid::Error (invalid input) on domain or order violations.
BasisBlock basis_block(std::span<const double> xs, const KnotVector& knots,
                       int order);

// One row of `basis_block` for a single point.
Eigen::RowVectorXd basis_row(double x, const KnotVector& knots, int order);

// All 4(m+2) functions of the recursion, vacuous ones included, in the
// combined layout described above (0-based column = combined index - 1).
Eigen::MatrixXd full_basis(std::span<const double> xs, const KnotVector& knots);

double spline_eval(double x, std::span<const double> coeffs,
                   const KnotVector& knots, int order);

// Second derivatives of the order-4 basis at x (interior of a knot
// interval; at a knot the right-hand piece is used).
Eigen::RowVectorXd cubic_second_derivative_row(double x, const KnotVector& knots);

// Gram matrix R(i,j) = integral over [k(1),k(m)] of b''_i(x) b''_j(x) for the
// order-4 basis, so that c'Rc is the integrated squared second derivative
// of the spline with coefficients c. Integrated exactly per knot interval.
Eigen::MatrixXd roughness_matrix(const KnotVector& knots);

}  // namespace liquid::splines
