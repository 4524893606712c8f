#include "pspan/inference.hpp"

#include <algorithm>
#include <cmath>

#include "pspan/errors.hpp"
#include "pspan/parallel.hpp"

namespace pspan {

namespace {

SpanningResult block_statistic(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                               std::size_t start, std::size_t b, const GridParams& grid,
                               const StatOptions& stat) {
  StatOptions inner = stat;
  inner.jobs = 1;
  return rho_star(window(panel, start, b), K, L, grid, inner);
}

StatOptions block_options(const ReturnPanel& panel, const GridParams& grid, const SubsampleOptions& options) {
  StatOptions stat = options.stat;
  if (options.freeze_knots) {
    if (!stat.negative_knots) stat.negative_knots = build_knots(panel, Side::negative, grid.n1);
    if (!stat.positive_knots) stat.positive_knots = build_knots(panel, Side::positive, grid.p1);
  }
  return stat;
}

}  // namespace

SubsampleDistribution subsample_distribution(const ReturnPanel& panel, const PortfolioSet& K,
                                             const PortfolioSet& L, std::size_t b, const GridParams& grid,
                                             const SubsampleOptions& options) {
  if (b < 1 || b > panel.periods()) throw ValidationError("block length must lie in [1, T]");
  const StatOptions stat = block_options(panel, grid, options);
  SubsampleDistribution dist{b, std::vector<double>(panel.periods() - b + 1)};
  parallel_for(dist.values.size(), stat.jobs, [&](std::size_t start) {
    dist.values[start] = block_statistic(panel, K, L, start, b, grid, stat).rho;
  });
  return dist;
}

double quantile(std::span<const double> values, double level) {
  if (values.empty()) throw ValidationError("quantile of an empty distribution");
  if (!(level > 0.0 && level <= 1.0)) throw ValidationError("quantile level must lie in (0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // cdf at sorted[i] is (i + 1) / n; compare in counts to avoid 0.95 * 100 rounding.
    if (static_cast<double>(i + 1) >= level * n - 1e-9) return sorted[i];
  }
  return sorted.back();
}

double quantile(const SubsampleDistribution& dist, double level) { return quantile(dist.values, level); }

BiasCorrection bias_corrected_quantile(const std::map<std::size_t, double>& quantiles, std::size_t periods) {
  if (quantiles.size() < 2) throw ValidationError("bias correction needs at least two block sizes");
  if (periods == 0) throw ValidationError("sample size must be positive");
  const double n = static_cast<double>(quantiles.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [b, q] : quantiles) {
    mean_x += 1.0 / static_cast<double>(b);
    mean_y += q;
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [b, q] : quantiles) {
    const double dx = 1.0 / static_cast<double>(b) - mean_x;
    sxx += dx * dx;
    sxy += dx * (q - mean_y);
  }
  if (!(sxx > 0.0)) throw ValidationError("bias correction needs distinct block sizes");
  BiasCorrection bc;
  bc.gamma1 = sxy / sxx;
  bc.gamma0 = mean_y - bc.gamma1 * mean_x;
  bc.q_bc = bc.gamma0 + bc.gamma1 / static_cast<double>(periods);
  return bc;
}

std::vector<std::size_t> block_sizes(std::size_t periods, std::span<const double> exponents) {
  std::vector<std::size_t> out;
  for (double e : exponents) {
    if (!(e > 0.0 && e <= 1.0)) throw ValidationError("block exponents must lie in (0, 1]");
    const double v = std::pow(static_cast<double>(periods), e);
    const double r = std::round(v);
    // T^e that is an integer up to rounding should not be bumped up by ceil.
    const double b = std::abs(v - r) <= 1e-9 * std::max(1.0, v) ? r : std::ceil(v);
    out.push_back(static_cast<std::size_t>(b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const char* to_string(Decision decision) {
  return decision == Decision::spanning ? "Spanning" : "Reject Spanning";
}

Decision decide(double rho, double q_bc) { return rho > q_bc ? Decision::reject_spanning : Decision::spanning; }

TestDecision redecide(const TestDecision& test, double alpha, std::size_t periods) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("alpha must lie in (0, 0.5)");
  TestDecision out = test;
  out.alpha = alpha;
  out.quantiles_per_b.clear();
  for (const auto& dist : test.distributions) out.quantiles_per_b[dist.b] = quantile(dist, 1.0 - alpha);
  const BiasCorrection bc = bias_corrected_quantile(out.quantiles_per_b, periods);
  out.q_bc = bc.q_bc;
  out.gamma0 = bc.gamma0;
  out.gamma1 = bc.gamma1;
  out.decision = decide(out.rho, out.q_bc);
  return out;
}

TestDecision spanning_test(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                           const TestOptions& options) {
  options.grid.validate();
  const std::size_t periods = panel.periods();
  const std::vector<std::size_t> sizes = block_sizes(periods, options.b_exponents);
  if (sizes.size() < 2) throw ValidationError("the block-size grid must give at least two distinct sizes");
  if (sizes.front() < options.min_block) {
    throw ValidationError("sample too short: smallest block " + std::to_string(sizes.front()) + " is below " +
                          std::to_string(options.min_block));
  }
  if (sizes.back() > periods) throw ValidationError("block size exceeds the sample length");

  TestDecision out;
  out.statistic = rho_star(panel, K, L, options.grid, options.subsample.stat);
  out.rho = out.statistic.rho;

  const StatOptions stat = block_options(panel, options.grid, options.subsample);
  struct Job {
    std::size_t dist;
    std::size_t start;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < sizes.size(); ++d) {
    out.distributions.push_back({sizes[d], std::vector<double>(periods - sizes[d] + 1)});
    for (std::size_t s = 0; s < periods - sizes[d] + 1; ++s) jobs.push_back({d, s});
  }
  parallel_for(jobs.size(), stat.jobs, [&](std::size_t j) {
    auto& dist = out.distributions[jobs[j].dist];
    dist.values[jobs[j].start] = block_statistic(panel, K, L, jobs[j].start, dist.b, options.grid, stat).rho;
  });
  return redecide(out, options.alpha, periods);
}

}  // namespace pspan
