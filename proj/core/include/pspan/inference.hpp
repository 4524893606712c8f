#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "pspan/spanning.hpp"

namespace pspan {

/// Statistic on every contiguous block of length b, each scaled by sqrt(b).
struct SubsampleDistribution {
  std::size_t b = 0;
  std::vector<double> values;  // ordered by block start
};

struct SubsampleOptions {
  StatOptions stat;
  /// Reuse the full-sample knot grids in every block instead of rebuilding
  /// them from the block's own range.
  bool freeze_knots = false;
};

SubsampleDistribution subsample_distribution(const ReturnPanel& panel, const PortfolioSet& K,
                                             const PortfolioSet& L, std::size_t b, const GridParams& grid = {},
                                             const SubsampleOptions& options = {});

/// Smallest order statistic whose empirical cdf reaches `level`.
double quantile(std::span<const double> values, double level);
double quantile(const SubsampleDistribution& dist, double level);

struct BiasCorrection {
  double q_bc = 0.0;
  double gamma0 = 0.0;  // intercept
  double gamma1 = 0.0;  // slope on 1/b
};

/// OLS of the quantiles on 1/b, evaluated at b = T.
BiasCorrection bias_corrected_quantile(const std::map<std::size_t, double>& quantiles, std::size_t periods);

/// ceil(T^e) for each exponent, ascending, duplicates removed.
std::vector<std::size_t> block_sizes(std::size_t periods, std::span<const double> exponents);

enum class Decision { spanning, reject_spanning };

const char* to_string(Decision decision);

/// Reject iff rho > q_bc.
Decision decide(double rho, double q_bc);

struct TestOptions {
  double alpha = 0.05;
  std::vector<double> b_exponents{0.6, 0.7, 0.8, 0.9};
  GridParams grid;
  SubsampleOptions subsample;
  std::size_t min_block = 10;
};

struct TestDecision {
  double rho = 0.0;
  double q_bc = 0.0;
  double alpha = 0.05;
  std::map<std::size_t, double> quantiles_per_b;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  Decision decision = Decision::spanning;
  SpanningResult statistic;
  std::vector<SubsampleDistribution> distributions;
};

/// Full procedure: statistic, subsample quantiles per block size, bias
/// correction and decision. Subsample blocks run in parallel.
TestDecision spanning_test(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                           const TestOptions& options = {});

/// The same test re-decided at another level from the stored distributions.
TestDecision redecide(const TestDecision& test, double alpha, std::size_t periods);

}  // namespace pspan
