#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace liquid::divstats {

// Labels are 1 for Good and 0 for Bad.
using Labels = std::vector<int>;

// Class-conditional moments of the predictors.
//   C = (Cov[X|G] + Cov[X|B]) / 2   (sample covariance, n-1 denominator)
//   d = E[X|G] - E[X|B]
//   e = E[X|G] + E[X|B]
struct DivStats {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  Eigen::VectorXd e;
};

struct WoeResult {
  double beta = 0.0;
  double div = 0.0;
  Eigen::VectorXd coeffs_woe;
};

// Index range [begin, begin + size) of a coefficient block inside the
// p-vector, with the penalty matrix for that block and its weight.
struct RoughnessBlock {
  int begin = 0;
  Eigen::MatrixXd penalty;
  double weight = 0.0;
};

DivStats divergence_stats(const Eigen::MatrixXd& X, const Labels& y);

// H = 2 (C + (lambda / p) I).
Eigen::MatrixXd h_matrix(const Eigen::MatrixXd& C, double lambda);

// H = 2 (C + (lambda / p) I + sum_k weight_k * R_k), R_k embedded at its range.
Eigen::MatrixXd h_matrix_with_roughness(const Eigen::MatrixXd& C, double lambda,
                                        std::span<const RoughnessBlock> blocks);

// (mean_G - mean_B)^2 / ((var_G + var_B) / 2) of the score X S.
double score_divergence(const Eigen::VectorXd& S, const Eigen::MatrixXd& X,
                        const Labels& y);

WoeResult woe_scale(const Eigen::VectorXd& S, const Eigen::MatrixXd& X,
                    const Labels& y);

}  // namespace liquid::divstats
