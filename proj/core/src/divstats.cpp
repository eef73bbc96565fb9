#include "liquid/divstats.hpp"

#include <cmath>
#include <string>

#include "liquid/error.hpp"

namespace liquid::divstats {
namespace {

constexpr const char* kStage = "divstats";

void check_labels(const Eigen::MatrixXd& X, const Labels& y) {
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    throw_invalid(kStage, "label count " + std::to_string(y.size()) +
                              " does not match design rows " +
                              std::to_string(X.rows()));
  }
  for (int v : y) {
    if (v != 0 && v != 1) throw_invalid(kStage, "labels must be 0 or 1");
  }
}

struct ClassSplit {
  Eigen::MatrixXd good;
  Eigen::MatrixXd bad;
};

ClassSplit split_classes(const Eigen::MatrixXd& X, const Labels& y) {
  check_labels(X, y);
  Eigen::Index n_good = 0;
  for (int v : y) n_good += v;
  const Eigen::Index n_bad = X.rows() - n_good;
  if (n_good < 2 || n_bad < 2) {
    throw_invalid(kStage, "each class needs at least 2 records (goods=" +
                              std::to_string(n_good) + ", bads=" +
                              std::to_string(n_bad) + ")");
  }
  ClassSplit s{Eigen::MatrixXd(n_good, X.cols()), Eigen::MatrixXd(n_bad, X.cols())};
  Eigen::Index ig = 0, ib = 0;
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    if (y[static_cast<std::size_t>(r)] == 1) {
      s.good.row(ig++) = X.row(r);
    } else {
      s.bad.row(ib++) = X.row(r);
    }
  }
  return s;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& Z, const Eigen::RowVectorXd& mean) {
  const Eigen::MatrixXd centered = Z.rowwise() - mean;
  return (centered.transpose() * centered) / static_cast<double>(Z.rows() - 1);
}

struct ScoreMoments {
  double num;    // mean_G - mean_B
  double denom;  // (var_G + var_B) / 2
};

ScoreMoments score_moments(const Eigen::VectorXd& S, const Eigen::MatrixXd& X,
                           const Labels& y) {
  if (S.size() != X.cols()) {
    throw_invalid(kStage, "coefficient length " + std::to_string(S.size()) +
                              " does not match design columns " +
                              std::to_string(X.cols()));
  }
  const ClassSplit s = split_classes(X, y);
  const Eigen::VectorXd good = s.good * S;
  const Eigen::VectorXd bad = s.bad * S;
  auto variance = [](const Eigen::VectorXd& v, double mean) {
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
  };
  const double mg = good.mean();
  const double mb = bad.mean();
  const ScoreMoments mom{mg - mb, 0.5 * (variance(good, mg) + variance(bad, mb))};
  if (!(mom.denom > 0.0) || !std::isfinite(mom.denom)) {
    throw_numerical(kStage, "pooled score variance is zero");
  }
  return mom;
}

}  // namespace

DivStats divergence_stats(const Eigen::MatrixXd& X, const Labels& y) {
  if (X.cols() < 1) throw_invalid(kStage, "design matrix has no columns");
  const ClassSplit s = split_classes(X, y);
  const Eigen::RowVectorXd mg = s.good.colwise().mean();
  const Eigen::RowVectorXd mb = s.bad.colwise().mean();
  DivStats out;
  out.C = 0.5 * (sample_covariance(s.good, mg) + sample_covariance(s.bad, mb));
  out.C = 0.5 * (out.C + out.C.transpose());
  out.d = (mg - mb).transpose();
  out.e = (mg + mb).transpose();
  return out;
}

Eigen::MatrixXd h_matrix(const Eigen::MatrixXd& C, double lambda) {
  if (C.rows() != C.cols()) throw_invalid(kStage, "C must be square");
  if (!(lambda >= 0.0)) throw_invalid(kStage, "lambda must be non-negative");
  const auto p = static_cast<double>(C.rows());
  Eigen::MatrixXd H = C;
  H.diagonal().array() += lambda / p;
  return 2.0 * H;
}

Eigen::MatrixXd h_matrix_with_roughness(const Eigen::MatrixXd& C, double lambda,
                                        std::span<const RoughnessBlock> blocks) {
  if (C.rows() != C.cols()) throw_invalid(kStage, "C must be square");
  if (!(lambda >= 0.0)) throw_invalid(kStage, "lambda must be non-negative");
  const Eigen::Index p = C.rows();
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  Eigen::MatrixXd inner = C;
  inner.diagonal().array() += lambda / static_cast<double>(p);
  for (const RoughnessBlock& b : blocks) {
    const Eigen::Index size = b.penalty.rows();
    if (b.penalty.cols() != size) throw_invalid(kStage, "roughness block must be square");
    if (!(b.weight >= 0.0)) throw_invalid(kStage, "roughness weight must be non-negative");
    if (b.begin < 0 || b.begin + size > p) {
      throw_invalid(kStage, "roughness block [" + std::to_string(b.begin) + ", " +
                                std::to_string(b.begin + size) + ") outside p=" +
                                std::to_string(p));
    }
    for (Eigen::Index k = b.begin; k < b.begin + size; ++k) {
      if (used[static_cast<std::size_t>(k)]) {
        throw_invalid(kStage, "roughness blocks overlap at index " + std::to_string(k));
      }
      used[static_cast<std::size_t>(k)] = true;
    }
    inner.block(b.begin, b.begin, size, size) += b.weight * b.penalty;
  }
  return 2.0 * inner;
}

double score_divergence(const Eigen::VectorXd& S, const Eigen::MatrixXd& X,
                        const Labels& y) {
  const ScoreMoments mom = score_moments(S, X, y);
  const double beta = mom.num / mom.denom;
  return mom.num * beta;
}

WoeResult woe_scale(const Eigen::VectorXd& S, const Eigen::MatrixXd& X,
                    const Labels& y) {
  const ScoreMoments mom = score_moments(S, X, y);
  WoeResult out;
  out.beta = mom.num / mom.denom;
  out.div = mom.num * out.beta;
  out.coeffs_woe = out.beta * S;
  return out;
}

}  // namespace liquid::divstats
