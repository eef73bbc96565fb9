#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fixtures.hpp"

#include "liquid/qp.hpp"
#include "liquid/scorecard.hpp"
#include "liquid/splines.hpp"

namespace {

void BM_BasisBlock(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  const liquid::splines::KnotVector knots({0, 5, 25, 35, 300, 1000});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<double> xs(10000);
  for (double& x : xs) x = u(rng);
  for (auto _ : state) {
    auto block = liquid::splines::basis_block(xs, knots, order);
    benchmark::DoNotOptimize(block.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_BasisBlock)->DenseRange(1, 4);

void BM_QpSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  liquid::qp::Problem pr;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = z(rng);
  pr.H = M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
  pr.f = Eigen::VectorXd::NullaryExpr(n, [&] { return 5.0 * z(rng); });
  pr.A = Eigen::MatrixXd::Zero(n - 1, n);
  for (int i = 0; i + 1 < n; ++i) {
    pr.A(i, i) = 1.0;
    pr.A(i, i + 1) = -1.0;
  }
  pr.b = Eigen::VectorXd::Zero(n - 1);
  pr.Aeq = Eigen::RowVectorXd::Ones(n);
  pr.beq = Eigen::VectorXd::Ones(1);
  for (auto _ : state) {
    auto sol = liquid::qp::solve(pr);
    benchmark::DoNotOptimize(sol.x.data());
  }
}
BENCHMARK(BM_QpSolve)->Arg(10)->Arg(50)->Arg(210);

void BM_Fit(benchmark::State& state) {
  const auto spec = fixture::spec({});
  const auto data = fixture::data(1, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = liquid::scorecard::fit(spec, data);
    benchmark::DoNotOptimize(r.coeffs_raw.data());
  }
}
BENCHMARK(BM_Fit)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
