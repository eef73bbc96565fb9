#include "liquid/splines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "liquid/error.hpp"

namespace liquid::splines {
namespace {

constexpr const char* kStage = "splines";

void check_order(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw_invalid(kStage, "spline order must be in 1..4, got " + std::to_string(order));
  }
}

void check_domain(double x, const KnotVector& knots) {
  if (!knots.contains(x)) {
    std::ostringstream os;
    os.precision(17);
    os << "x=" << x << " outside knot domain [" << knots.front() << ", "
       << knots.back() << "]";
    throw_invalid(kStage, os.str());
  }
}

// Evaluates the recursion at one point. `levels` receives 4(m+2) values with
// function i (1-based) of level j stored at (i-1) + (m+2)(j-1).
class Recursion {
 public:
  explicit Recursion(const KnotVector& knots)
      : m_(knots.size()), t_(pad_knots(knots).t), width_(m_ + 2) {}

  int width() const { return width_; }

  // t(i) with the 1-based indexing of the padded sequence.
  double t(int i) const { return t_[static_cast<std::size_t>(i - 1)]; }

  void evaluate(double x, std::vector<double>& levels) const {
    levels.assign(static_cast<std::size_t>(kMaxOrder * width_), 0.0);
    auto at = [&](int i, int j) -> double& {
      return levels[static_cast<std::size_t>((i - 1) + width_ * (j - 1))];
    };
    for (int i = 1; i <= m_ + 1; ++i) {
      at(i, 1) = (t(i) <= x && x < t(i + 1)) ? 1.0 : 0.0;
    }
    at(m_ + 2, 1) = (t(m_ + 2) <= x && x <= t(m_ + 3)) ? 1.0 : 0.0;

    for (int j = 2; j <= kMaxOrder; ++j) {
      for (int i = 1; i <= m_ + 2; ++i) {
        double term1 = 0.0;
        if (t(i + j - 1) > t(i)) {
          term1 = (x - t(i)) / (t(i + j - 1) - t(i)) * at(i, j - 1);
        }
        double term2 = 0.0;
        // i = m+2 never passes this test: t(m+2+j) = t(m+3) = k(m) for j >= 2.
        if (t(i + j) > t(i + 1)) {
          term2 = (t(i + j) - x) / (t(i + j) - t(i + 1)) * at(i + 1, j - 1);
        }
        at(i, j) = term1 + term2;
      }
    }
  }

 private:
  int m_;
  std::vector<double> t_;
  int width_;
};

int first_index_for(int num_knots, int order) {
  return (5 - order) + (num_knots + 2) * (order - 1);
}

}  // namespace

KnotVector::KnotVector(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) {
    throw_invalid(kStage, "knot vector needs at least 2 knots");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i])) {
      throw_invalid(kStage, "knots must be finite");
    }
    if (i > 0 && !(knots_[i - 1] < knots_[i])) {
      throw_invalid(kStage, "knots must be strictly increasing (position " +
                                std::to_string(i) + ")");
    }
  }
}

double KnotVector::clamp(double x) const noexcept {
  return std::clamp(x, front(), back());
}

PaddedKnots pad_knots(const KnotVector& knots) {
  const int m = knots.size();
  PaddedKnots padded;
  padded.t.reserve(static_cast<std::size_t>(m + 6));
  for (int i = 0; i < 3; ++i) padded.t.push_back(knots.front());
  padded.t.insert(padded.t.end(), knots.values().begin(), knots.values().end());
  for (int i = 0; i < 3; ++i) padded.t.push_back(knots.back());
  return padded;
}

int basis_count(int num_knots, int order) {
  check_order(order);
  return num_knots + order - 2;
}

BasisBlock basis_block(std::span<const double> xs, const KnotVector& knots,
                       int order) {
  check_order(order);
  const Recursion recursion(knots);
  const int q = basis_count(knots.size(), order);
  BasisBlock block;
  block.order = order;
  block.first_index = first_index_for(knots.size(), order);
  block.values.resize(static_cast<Eigen::Index>(xs.size()), q);

  std::vector<double> levels;
  const int offset = block.first_index - 1;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    check_domain(xs[r], knots);
    recursion.evaluate(xs[r], levels);
    for (int c = 0; c < q; ++c) {
      block.values(static_cast<Eigen::Index>(r), c) =
          levels[static_cast<std::size_t>(offset + c)];
    }
  }
  return block;
}

Eigen::RowVectorXd basis_row(double x, const KnotVector& knots, int order) {
  const double xs[] = {x};
  return basis_block(xs, knots, order).values.row(0);
}

Eigen::MatrixXd full_basis(std::span<const double> xs, const KnotVector& knots) {
  const Recursion recursion(knots);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()),
                      kMaxOrder * recursion.width());
  std::vector<double> levels;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    check_domain(xs[r], knots);
    recursion.evaluate(xs[r], levels);
    out.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(levels.data(),
                                             static_cast<Eigen::Index>(levels.size()));
  }
  return out;
}

double spline_eval(double x, std::span<const double> coeffs,
                   const KnotVector& knots, int order) {
  const int q = basis_count(knots.size(), order);
  if (static_cast<int>(coeffs.size()) != q) {
    throw_invalid(kStage, "expected " + std::to_string(q) +
                              " coefficients for order " + std::to_string(order) +
                              ", got " + std::to_string(coeffs.size()));
  }
  const Eigen::RowVectorXd row = basis_row(x, knots, order);
  double sum = 0.0;
  for (int c = 0; c < q; ++c) sum += row(c) * coeffs[static_cast<std::size_t>(c)];
  return sum;
}

Eigen::RowVectorXd cubic_second_derivative_row(double x, const KnotVector& knots) {
  check_domain(x, knots);
  const Recursion recursion(knots);
  const int m = knots.size();
  std::vector<double> levels;
  recursion.evaluate(x, levels);
  auto order2 = [&](int i) {
    return (i >= 1 && i <= m + 2) ? levels[static_cast<std::size_t>((i - 1) + (m + 2))]
                                  : 0.0;
  };
  auto t = [&](int i) { return recursion.t(i); };
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  // First derivative of the order-3 functions from the order-2 values.
  auto d1_order3 = [&](int i) {
    if (i < 1 || i > m + 2) return 0.0;
    return 2.0 * (ratio(order2(i), t(i + 2) - t(i)) -
                  ratio(order2(i + 1), t(i + 3) - t(i + 1)));
  };

  Eigen::RowVectorXd row(m + 2);
  for (int i = 1; i <= m + 2; ++i) {
    row(i - 1) = 3.0 * (ratio(d1_order3(i), t(i + 3) - t(i)) -
                        ratio(d1_order3(i + 1), t(i + 4) - t(i + 1)));
  }
  return row;
}

Eigen::MatrixXd roughness_matrix(const KnotVector& knots) {
  const int q = knots.size() + 2;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(q, q);
  // Second derivatives are linear on each interval, so the integrand is
  // quadratic and two-point Gauss-Legendre is exact.
  const double node = 1.0 / (2.0 * std::sqrt(3.0));
  for (int l = 0; l + 1 < knots.size(); ++l) {
    const double a = knots[l];
    const double h = knots[l + 1] - a;
    const double mid = a + 0.5 * h;
    for (double s : {-node, node}) {
      const Eigen::RowVectorXd r = cubic_second_derivative_row(mid + s * h, knots);
      gram.noalias() += 0.5 * h * (r.transpose() * r);
    }
  }
  return 0.5 * (gram + gram.transpose());
}

}  // namespace liquid::splines
