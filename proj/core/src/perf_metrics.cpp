#include "pspan/perf_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"

namespace pspan {

namespace {

double mean_of(std::span<const double> x) {
  if (x.empty()) throw ValidationError("empty return series");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("standard deviation needs at least two returns");
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

std::optional<double> sharpe_ratio(std::span<const double> returns, double rf_mean) {
  const double sd = sd_of(returns);
  if (!(sd > 0.0)) return std::nullopt;
  return (mean_of(returns) - rf_mean) / sd;
}

std::optional<double> downside_sharpe(std::span<const double> returns, double rf_mean) {
  if (returns.size() < 2) throw ValidationError("downside Sharpe needs at least two returns");
  double ss = 0.0;
  for (double v : returns) {
    if (v < 0.0) ss += v * v;
  }
  if (!(ss > 0.0)) return std::nullopt;
  const double sigma = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  return (mean_of(returns) - rf_mean) / (std::sqrt(2.0) * sigma);
}

std::optional<double> up_ratio(std::span<const double> returns, std::span<const double> benchmark) {
  if (returns.size() != benchmark.size()) throw ValidationError("benchmark length differs from the returns");
  if (returns.empty()) throw ValidationError("empty return series");
  double up = 0.0, down = 0.0;
  for (std::size_t t = 0; t < returns.size(); ++t) {
    up += std::max(0.0, returns[t] - benchmark[t]);
    const double s = std::max(0.0, benchmark[t] - returns[t]);
    down += s * s;
  }
  const double k = static_cast<double>(returns.size());
  const double denom = std::sqrt(down / k);
  if (!(denom > 0.0)) return std::nullopt;
  return (up / k) / denom;
}

double prospect_value(double x, double alpha, double beta, double gamma) {
  return x >= 0.0 ? std::pow(x, alpha) : -gamma * std::pow(-x, beta);
}

double opportunity_cost(std::span<const double> r_factor, std::span<const double> r_aug, double alpha, double beta,
                        double gamma) {
  if (!(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0)) {
    throw ValidationError("alpha and beta must lie in (0, 1]");
  }
  if (!(gamma > 0.0)) throw ValidationError("loss aversion must be positive");
  if (r_factor.size() != r_aug.size() || r_factor.empty()) {
    throw ValidationError("opportunity cost needs two nonempty series of equal length");
  }
  auto expected = [&](std::span<const double> r, double shift) {
    double s = 0.0;
    for (double v : r) s += prospect_value(1.0 + v + shift, alpha, beta, gamma);
    return s / static_cast<double>(r.size());
  };
  const double target = expected(r_aug, 0.0);
  const auto [f_lo, f_hi] = std::minmax_element(r_factor.begin(), r_factor.end());
  const auto [a_lo, a_hi] = std::minmax_element(r_aug.begin(), r_aug.end());
  double lo = *a_lo - *f_hi;
  double hi = *a_hi - *f_lo;
  double g_lo = expected(r_factor, lo) - target;
  double g_hi = expected(r_factor, hi) - target;
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if (g_lo > 0.0 || g_hi < 0.0) throw ValidationError("opportunity cost bracket does not contain a root");
  // Bisect well past the 1e-10 target so the midpoint error is negligible.
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double g = expected(r_factor, mid) - target;
    if (g == 0.0) return mid;
    (g < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> net_of_cost_returns(std::span<const double> returns, const RowMatrix& weights, double trc,
                                        bool charge_first) {
  if (trc < 0.0) throw ValidationError("transaction cost must be nonnegative");
  if (static_cast<std::size_t>(weights.rows()) != returns.size()) {
    throw ValidationError("weight track and returns differ in length");
  }
  std::vector<double> out(returns.size());
  for (std::size_t t = 0; t < returns.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    double turnover = 0.0;
    if (t > 0) {
      turnover = (weights.row(row) - weights.row(row - 1)).cwiseAbs().sum();
    } else if (charge_first) {
      turnover = weights.row(0).cwiseAbs().sum();
    }
    const double cost = trc * turnover;
    out[t] = cost == 0.0 ? returns[t] : (1.0 + returns[t]) * (1.0 - cost) - 1.0;
  }
  return out;
}

double return_loss(std::span<const double> net_factor, std::span<const double> net_aug) {
  const double sd_aug = sd_of(net_aug);
  if (!(sd_aug > 0.0)) throw ValidationError("return loss undefined: augmented series has zero volatility");
  return mean_of(net_aug) / sd_aug * sd_of(net_factor) - mean_of(net_factor);
}

PerfReport perf_report(const BacktestTrack& track, std::span<const double> rf, const PerfOptions& options) {
  if (track.size() == 0) throw ValidationError("empty backtest track");
  std::vector<double> bench(track.size(), 0.0);
  if (!rf.empty()) {
    if (rf.size() != track.size()) throw ValidationError("risk-free series does not match the track");
    bench.assign(rf.begin(), rf.end());
  }
  const double rf_mean = mean_of(bench);

  auto series = [&](const std::vector<double>& r) {
    SeriesPerf p;
    p.mean = mean_of(r);
    if (r.size() >= 2) {
      p.sd = sd_of(r);
      p.sharpe = sharpe_ratio(r, rf_mean);
      p.downside_sharpe = downside_sharpe(r, rf_mean);
    }
    p.up_ratio = up_ratio(r, bench);
    return p;
  };

  PerfReport report;
  report.factor = series(track.r_factor);
  report.aug = series(track.r_aug);
  const auto net_f = net_of_cost_returns(track.r_factor, track.w_factor, options.trc, options.charge_first);
  const auto net_a = net_of_cost_returns(track.r_aug, track.w_aug, options.trc, options.charge_first);
  if (net_a.size() >= 2 && sd_of(net_a) > 0.0) report.return_loss = return_loss(net_f, net_a);
  for (double a : options.alphas) {
    report.opportunity_cost.emplace_back(a, opportunity_cost(track.r_factor, track.r_aug, a, a, options.gamma));
  }
  return report;
}

void write_perf_csv(const PerfReport& report, std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_exact(*v) : std::string("NA"); };
  csv::write_row(out, {"measure", "factor", "aug"});
  csv::write_row(out, {"mean", csv::format_exact(report.factor.mean), csv::format_exact(report.aug.mean)});
  csv::write_row(out, {"sd", csv::format_exact(report.factor.sd), csv::format_exact(report.aug.sd)});
  csv::write_row(out, {"sharpe", opt(report.factor.sharpe), opt(report.aug.sharpe)});
  csv::write_row(out, {"downside_sharpe", opt(report.factor.downside_sharpe), opt(report.aug.downside_sharpe)});
  csv::write_row(out, {"up_ratio", opt(report.factor.up_ratio), opt(report.aug.up_ratio)});
  csv::write_row(out, {"return_loss", "", opt(report.return_loss)});
  for (const auto& [a, theta] : report.opportunity_cost) {
    csv::write_row(out, {"opportunity_cost_alpha_" + csv::format_exact(a), "", csv::format_exact(theta)});
  }
}

}  // namespace pspan
