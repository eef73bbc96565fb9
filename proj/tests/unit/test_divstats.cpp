#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "liquid/divstats.hpp"
#include "liquid/error.hpp"

namespace ds = liquid::divstats;

namespace {

struct Sample {
  Eigen::MatrixXd X;
  ds::Labels y;
};

Sample random_sample(std::uint64_t seed, int n, int p) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Sample s{Eigen::MatrixXd(n, p), ds::Labels(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i) {
    s.y[static_cast<std::size_t>(i)] = (i % 3 == 0) ? 0 : 1;
    for (int j = 0; j < p; ++j) s.X(i, j) = z(rng) + (s.y[static_cast<std::size_t>(i)] ? 0.3 * j : 0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("hand computed statistics") {
  Eigen::MatrixXd X(6, 1);
  X << 1, 2, 3, 0, 1, 2;
  const ds::Labels y{1, 1, 1, 0, 0, 0};
  const auto st = ds::divergence_stats(X, y);
  CHECK(st.C(0, 0) == doctest::Approx(1.0));
  CHECK(st.d(0) == doctest::Approx(1.0));
  CHECK(st.e(0) == doctest::Approx(3.0));
}

TEST_CASE("statistics match a two-pass covariance") {
  const auto s = random_sample(1, 300, 5);
  const auto st = ds::divergence_stats(s.X, s.y);
  std::vector<std::vector<double>> good, bad;
  for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
    std::vector<double> r;
    for (Eigen::Index j = 0; j < s.X.cols(); ++j) r.push_back(s.X(i, j));
    (s.y[static_cast<std::size_t>(i)] ? good : bad).push_back(r);
  }
  const Eigen::MatrixXd C = (oracle::covariance(good) + oracle::covariance(bad)) / 2.0;
  CHECK((st.C - C).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("degenerate classes and bad labels are rejected") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  CHECK_THROWS_AS(ds::divergence_stats(X, {1, 1, 0}), liquid::Error);
  CHECK_THROWS_AS(ds::divergence_stats(X, {1, 2, 0}), liquid::Error);
  CHECK_THROWS_AS(ds::divergence_stats(X, {1, 0}), liquid::Error);
}

TEST_CASE("H matrix") {
  Eigen::MatrixXd C(2, 2);
  C << 2, 1, 1, 3;
  const Eigen::MatrixXd H = ds::h_matrix(C, 0.5);
  CHECK(H(0, 0) == doctest::Approx(2 * (2 + 0.25)));
  CHECK(H(0, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ds::h_matrix(C, -1.0), liquid::Error);

  ds::RoughnessBlock blk{1, Eigen::MatrixXd::Constant(1, 1, 4.0), 0.5};
  const std::vector<ds::RoughnessBlock> blocks{blk};
  const Eigen::MatrixXd Hr = ds::h_matrix_with_roughness(C, 0.0, blocks);
  CHECK(Hr(1, 1) == doctest::Approx(2 * (3 + 2)));
  CHECK(Hr(0, 0) == doctest::Approx(4.0));

  ds::RoughnessBlock bad{1, Eigen::MatrixXd::Identity(2, 2), 1.0};
  const std::vector<ds::RoughnessBlock> oob{bad};
  CHECK_THROWS_AS(ds::h_matrix_with_roughness(C, 0.0, oob), liquid::Error);
  const std::vector<ds::RoughnessBlock> overlap{blk, blk};
  CHECK_THROWS_AS(ds::h_matrix_with_roughness(C, 0.0, overlap), liquid::Error);
}

TEST_CASE("divergence and WOE scale of a hand example") {
  Eigen::MatrixXd X(4, 1);
  X << 2, 4, 0, 2;
  const ds::Labels y{1, 1, 0, 0};
  Eigen::VectorXd S(1);
  S << 1.0;
  CHECK(ds::score_divergence(S, X, y) == doctest::Approx(2.0));
  const auto w = ds::woe_scale(S, X, y);
  CHECK(w.beta == doctest::Approx(1.0));
  CHECK(w.div == doctest::Approx(2.0));
}

TEST_CASE("divergence equals the quadratic form identity") {
  const auto s = random_sample(2, 400, 4);
  const auto st = ds::divergence_stats(s.X, s.y);
  const Eigen::VectorXd S = Eigen::VectorXd::LinSpaced(4, -1.0, 2.0);
  const double q = st.d.dot(S);
  CHECK(ds::score_divergence(S, s.X, s.y) == doctest::Approx(q * q / S.dot(st.C * S)).epsilon(1e-12));
}

TEST_CASE("WOE scaling is a fixed point and divergence is scale invariant") {
  const auto s = random_sample(3, 500, 3);
  Eigen::VectorXd S(3);
  S << 0.4, -1.3, 2.2;
  const auto once = ds::woe_scale(S, s.X, s.y);
  const auto twice = ds::woe_scale(once.coeffs_woe, s.X, s.y);
  CHECK(std::abs(twice.beta - 1.0) <= 1e-12);
  for (double c : {0.1, 3.0, 100.0}) {
    CHECK(std::abs(ds::score_divergence(c * S, s.X, s.y) - once.div) <= 1e-10 * once.div);
  }
}

TEST_CASE("constant score has no scale") {
  Eigen::MatrixXd X(4, 1);
  X << 1, 1, 1, 1;
  Eigen::VectorXd S(1);
  S << 1.0;
  CHECK_THROWS_AS(ds::woe_scale(S, X, {1, 1, 0, 0}), liquid::Error);
}

TEST_CASE("identical classes have zero mean difference") {
  Eigen::MatrixXd X(6, 2);
  X << 1, 5, 2, 3, 7, 1, 1, 5, 2, 3, 7, 1;
  const auto st = ds::divergence_stats(X, {1, 1, 1, 0, 0, 0});
  CHECK(st.d.cwiseAbs().maxCoeff() == 0.0);
  Eigen::VectorXd S(2);
  S << 1.0, -2.0;
  CHECK(ds::score_divergence(S, X, {1, 1, 1, 0, 0, 0}) == 0.0);
}

TEST_CASE("H matrix identities") {
  const auto s = random_sample(4, 50, 3);
  const auto st = ds::divergence_stats(s.X, s.y);
  CHECK(ds::h_matrix(st.C, 0.0) == 2.0 * st.C);
  CHECK(ds::h_matrix(Eigen::MatrixXd::Identity(3, 3), 3.0) == 4.0 * Eigen::MatrixXd::Identity(3, 3));
  const Eigen::MatrixXd H = ds::h_matrix(st.C, 0.5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(H(i, j) - 2.0 * (st.C(i, j) + (i == j ? 0.5 / 3.0 : 0.0))) <= 1e-15);

  CHECK(ds::h_matrix_with_roughness(st.C, 0.5, {}) == H);
  Eigen::MatrixXd R(2, 2);
  R << 2, -1, -1, 2;
  const std::vector<ds::RoughnessBlock> zero{{1, R, 0.0}};
  CHECK(ds::h_matrix_with_roughness(st.C, 0.5, zero) == H);
  const std::vector<ds::RoughnessBlock> one{{1, R, 1.0}};
  const Eigen::MatrixXd diff = ds::h_matrix_with_roughness(st.C, 0.5, one) - H;
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected.bottomRightCorner(2, 2) = 2.0 * R;
  CHECK((diff - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("moment identities for random scores") {
  const auto s = random_sample(6, 400, 4);
  const auto st = ds::divergence_stats(s.X, s.y);
  CHECK((st.C - st.C.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(st.C).eigenvalues().minCoeff() >= -1e-10);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> z;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd S(4);
    for (int i = 0; i < 4; ++i) S(i) = z(rng);
    const Eigen::VectorXd score = s.X * S;
    double mg = 0, mb = 0, ng = 0, nb = 0;
    for (Eigen::Index i = 0; i < score.size(); ++i) {
      if (s.y[static_cast<std::size_t>(i)]) { mg += score(i); ng += 1; } else { mb += score(i); nb += 1; }
    }
    mg /= ng;
    mb /= nb;
    double vg = 0, vb = 0;
    for (Eigen::Index i = 0; i < score.size(); ++i) {
      if (s.y[static_cast<std::size_t>(i)]) vg += (score(i) - mg) * (score(i) - mg);
      else vb += (score(i) - mb) * (score(i) - mb);
    }
    vg /= ng - 1;
    vb /= nb - 1;
    CHECK(std::abs(st.d.dot(S) - (mg - mb)) <= 1e-10);
    CHECK(std::abs(S.dot(st.C * S) - (vg + vb) / 2) <= 1e-8);
    const auto w = ds::woe_scale(S, s.X, s.y);
    CHECK(std::abs(w.div - ds::score_divergence(S, s.X, s.y)) <= 1e-12);
    CHECK((w.coeffs_woe - w.beta * S).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("a constant column leaves divergence unchanged") {
  auto s = random_sample(7, 200, 3);
  Eigen::MatrixXd X(s.X.rows(), 4);
  X.leftCols(3) = s.X;
  X.col(3).setConstant(1.0);
  Eigen::VectorXd S(4);
  S << 0.3, -0.7, 1.1, 0.0;
  const double base = ds::score_divergence(S, X, s.y);
  S(3) = 5.0;
  CHECK(std::abs(ds::score_divergence(S, X, s.y) - base) <= 1e-10 * base);
}
