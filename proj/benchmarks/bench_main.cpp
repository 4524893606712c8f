#include <benchmark/benchmark.h>

#include <random>

#include "pspan/eu_max.hpp"
#include "pspan/inference.hpp"
#include "pspan/spanning.hpp"
#include "pspan/utility_grid.hpp"

namespace {

using namespace pspan;

ReturnPanel make_panel(std::size_t periods, std::size_t assets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.005, 0.04);
  RowMatrix v(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(assets));
  std::vector<std::string> dates, names;
  for (std::size_t t = 0; t < periods; ++t) {
    const std::size_t y = 1960 + t / 12, m = t % 12 + 1;
    dates.push_back(std::to_string(y) + (m < 10 ? "0" : "") + std::to_string(m));
    for (Eigen::Index i = 0; i < v.cols(); ++i) v(static_cast<Eigen::Index>(t), i) = nd(rng);
  }
  for (std::size_t i = 0; i < assets; ++i) names.push_back("A" + std::to_string(i + 1));
  return ReturnPanel(std::move(dates), std::move(names), std::move(v));
}

void BM_EnumerateWeights(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_weights(k, 5));
}
BENCHMARK(BM_EnumerateWeights)->Arg(6)->Arg(10)->Arg(14);

void BM_MaxEuConcave(benchmark::State& state) {
  const ReturnPanel p = make_panel(static_cast<std::size_t>(state.range(0)), 6, 1);
  const auto set = PortfolioSet::all(p);
  const auto family = build_family(p, Side::positive, 10, 5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_eu_concave(p, set, family.members[i]));
    i = (i + 97) % family.members.size();
  }
}
BENCHMARK(BM_MaxEuConcave)->Arg(60)->Arg(300)->Arg(600)->Unit(benchmark::kMicrosecond);

void BM_MaxEuConvex(benchmark::State& state) {
  const ReturnPanel p = make_panel(300, 6, 2);
  const auto set = PortfolioSet::all(p);
  const auto family = build_family(p, Side::negative, 10, 5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_eu_convex(p, set, family.members[i]));
    i = (i + 97) % family.members.size();
  }
}
BENCHMARK(BM_MaxEuConvex)->Unit(benchmark::kMicrosecond);

void BM_RhoStar(benchmark::State& state) {
  const ReturnPanel p = make_panel(static_cast<std::size_t>(state.range(0)), 6, 3);
  const auto K = PortfolioSet::of_indices(p, {0, 1, 2, 3, 4});
  const auto L = PortfolioSet::all(p);
  for (auto _ : state) benchmark::DoNotOptimize(rho_star(p, K, L));
}
BENCHMARK(BM_RhoStar)->Arg(120)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_SubsampleDistribution(benchmark::State& state) {
  const ReturnPanel p = make_panel(120, 3, 4);
  const auto K = PortfolioSet::of_indices(p, {0, 1});
  const auto L = PortfolioSet::all(p);
  const GridParams grid{6, 3, 6, 3};
  for (auto _ : state) benchmark::DoNotOptimize(subsample_distribution(p, K, L, 40, grid));
}
BENCHMARK(BM_SubsampleDistribution)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
