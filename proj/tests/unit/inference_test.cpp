#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "pspan/errors.hpp"
#include "pspan/inference.hpp"

namespace pspan {
namespace {

const GridParams kSmall{4, 3, 4, 3};

TEST(Subsample, CountsAndNullValues) {
  std::mt19937_64 rng(1);
  const auto p = test::random_panel(rng, 5, 2);
  const auto K = PortfolioSet::of_indices(p, {0});
  const auto d = subsample_distribution(p, K, PortfolioSet::all(p), 3, kSmall);
  EXPECT_EQ(d.values.size(), 3u);
  for (double v : d.values) EXPECT_GE(v, 0.0);
  const auto same = subsample_distribution(p, PortfolioSet::all(p), PortfolioSet::all(p), 3, kSmall);
  for (double v : same.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(subsample_distribution(p, K, PortfolioSet::all(p), 6, kSmall), ValidationError);
}

TEST(Subsample, ConstantPanelGivesZeros) {
  std::vector<std::vector<double>> rows(8, {0.01, 0.01});
  const auto p = test::make_panel(rows);
  const auto d = subsample_distribution(p, PortfolioSet::of_indices(p, {0}), PortfolioSet::all(p), 4, kSmall);
  for (double v : d.values) EXPECT_EQ(v, 0.0);
}

TEST(Subsample, FullBlockEqualsStatistic) {
  std::mt19937_64 rng(2);
  const auto p = test::random_panel(rng, 12, 3);
  const auto K = PortfolioSet::of_indices(p, {0, 1});
  const auto d = subsample_distribution(p, K, PortfolioSet::all(p), 12, kSmall);
  ASSERT_EQ(d.values.size(), 1u);
  EXPECT_EQ(d.values[0], rho_star(p, K, PortfolioSet::all(p), kSmall).rho);
}

TEST(Subsample, FrozenKnotsOption) {
  std::mt19937_64 rng(3);
  const auto p = test::random_panel(rng, 14, 2);
  const auto K = PortfolioSet::of_indices(p, {0});
  SubsampleOptions frozen;
  frozen.freeze_knots = true;
  const auto a = subsample_distribution(p, K, PortfolioSet::all(p), 7, kSmall, frozen);
  EXPECT_EQ(a.values.size(), 8u);
  // The full-length block sees the same knots either way.
  const auto f = subsample_distribution(p, K, PortfolioSet::all(p), 14, kSmall, frozen);
  EXPECT_EQ(f.values[0], rho_star(p, K, PortfolioSet::all(p), kSmall).rho);
}

TEST(Quantile, InfConvention) {
  const std::vector<double> tens(10, 0.1);
  EXPECT_EQ(quantile(tens, 0.95), 0.1);
  std::vector<double> hundred;
  for (int i = 100; i >= 1; --i) hundred.push_back(i);
  EXPECT_EQ(quantile(hundred, 0.95), 95.0);
  EXPECT_EQ(quantile(std::vector<double>{0, 0, 0, 5}, 0.75), 0.0);
  EXPECT_EQ(quantile(hundred, 1.0), 100.0);
  EXPECT_THROW(quantile(std::vector<double>{}, 0.9), ValidationError);
}

TEST(Quantile, NondecreasingInLevel) {
  std::mt19937_64 rng(4);
  std::exponential_distribution<double> e(3.0);
  std::vector<double> v(57);
  for (auto& x : v) x = e(rng);
  double prev = -1.0;
  for (double level = 0.51; level <= 1.0; level += 0.01) {
    const double q = quantile(v, level);
    EXPECT_GE(q, prev);
    prev = q;
  }
  EXPECT_EQ(quantile(v, 1.0), *std::max_element(v.begin(), v.end()));
}

TEST(BiasCorrection, ConstantQuantiles) {
  const auto bc = bias_corrected_quantile({{24, 0.3}, {41, 0.3}, {70, 0.3}, {118, 0.3}}, 200);
  EXPECT_NEAR(bc.q_bc, 0.3, 1e-15);
  EXPECT_NEAR(bc.gamma1, 0.0, 1e-13);
}

TEST(BiasCorrection, ExactLine) {
  std::map<std::size_t, double> q;
  for (std::size_t b : {42u, 78u, 145u, 270u}) q[b] = 0.01 + 0.5 / static_cast<double>(b);
  const auto bc = bias_corrected_quantile(q, 500);
  EXPECT_NEAR(bc.q_bc, 0.011, 1e-12);
  EXPECT_NEAR(bc.gamma0, 0.01, 1e-12);
  EXPECT_NEAR(bc.gamma1, 0.5, 1e-10);
}

TEST(BiasCorrection, NoisyMatchesNormalEquations) {
  // Independent oracle: solve the 2x2 normal equations directly.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::size_t, double> q{{20, u(rng)}, {33, u(rng)}, {55, u(rng)}, {90, u(rng)}};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [b, y] : q) {
      const double x = 1.0 / static_cast<double>(b);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double det = 4 * sxx - sx * sx;
    const double g0 = (sxx * sy - sx * sxy) / det;
    const double g1 = (4 * sxy - sx * sy) / det;
    const auto bc = bias_corrected_quantile(q, 150);
    EXPECT_NEAR(bc.gamma0, g0, 1e-12);
    EXPECT_NEAR(bc.q_bc, g0 + g1 / 150.0, 1e-12);
  }
}

TEST(BiasCorrection, NeedsTwoSizes) {
  EXPECT_THROW(bias_corrected_quantile({{20, 0.1}}, 100), ValidationError);
}

TEST(BlockSizes, CeilAndDedupe) {
  const std::vector<double> e{0.6, 0.7, 0.8, 0.9};
  EXPECT_EQ(block_sizes(200, e), (std::vector<std::size_t>{25, 41, 70, 118}));
  // 100^0.5 is exactly 10, not 11.
  EXPECT_EQ(block_sizes(100, std::vector<double>{0.5, 0.5}), (std::vector<std::size_t>{10}));
}

TEST(Decide, StrictInequality) {
  EXPECT_EQ(decide(0.0696, 0.0204), Decision::reject_spanning);
  EXPECT_EQ(decide(0.0016, 0.0025), Decision::spanning);
  EXPECT_EQ(decide(0.0, 0.0), Decision::spanning);
  EXPECT_STREQ(to_string(Decision::reject_spanning), "Reject Spanning");
}

TEST(SpanningTest, NullAcceptsAtEveryLevel) {
  std::mt19937_64 rng(6);
  const auto p = test::random_panel(rng, 60, 2);
  TestOptions opt;
  opt.grid = kSmall;
  const auto d = spanning_test(p, PortfolioSet::all(p), PortfolioSet::all(p), opt);
  for (double a : {0.01, 0.05, 0.10}) {
    const auto r = redecide(d, a, p.periods());
    EXPECT_EQ(r.decision, Decision::spanning);
    EXPECT_EQ(r.rho, 0.0);
    EXPECT_GE(r.q_bc, 0.0);
  }
}

TEST(SpanningTest, ShortSampleRejected) {
  std::mt19937_64 rng(7);
  const auto p = test::random_panel(rng, 30, 2);
  EXPECT_THROW(spanning_test(p, PortfolioSet::of_indices(p, {0}), PortfolioSet::all(p)), ValidationError);
}

TEST(SpanningTest, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(8);
  const auto p = test::random_panel(rng, 60, 3);
  TestOptions one, four;
  one.grid = four.grid = kSmall;
  four.subsample.stat.jobs = 4;
  const auto K = PortfolioSet::of_indices(p, {0});
  const auto a = spanning_test(p, K, PortfolioSet::all(p), one);
  const auto b = spanning_test(p, K, PortfolioSet::all(p), four);
  EXPECT_EQ(a.rho, b.rho);
  EXPECT_EQ(a.q_bc, b.q_bc);
  EXPECT_EQ(a.quantiles_per_b, b.quantiles_per_b);
  EXPECT_EQ(a.decision, b.decision);
}

}  // namespace
}  // namespace pspan
