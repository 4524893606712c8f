#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pspan/backtest.hpp"

namespace pspan {

/// Plain Sharpe ratio (mean - rf_mean) / sd; undefined for a constant series.
std::optional<double> sharpe_ratio(std::span<const double> returns, double rf_mean = 0.0);

/// (mean - rf_mean) / (sqrt(2) sigma_-), sigma_-^2 = sum min(x, 0)^2 / (T - 1).
/// Undefined without a negative return.
std::optional<double> downside_sharpe(std::span<const double> returns, double rf_mean = 0.0);

/// Mean upside over the benchmark divided by the root mean squared
/// shortfall below it. Undefined when the series never falls short.
std::optional<double> up_ratio(std::span<const double> returns, std::span<const double> benchmark);

/// S-shaped value of gross wealth: x^alpha for x >= 0, -gamma (-x)^beta below.
double prospect_value(double x, double alpha, double beta, double gamma);

/// Certain return theta with E[U(1 + R_F + theta)] = E[U(1 + R_Aug)],
/// found by bisection.
double opportunity_cost(std::span<const double> r_factor, std::span<const double> r_aug, double alpha, double beta,
                        double gamma = 2.25);

/// Monthly returns after proportional costs on turnover:
/// (1 + R_t)(1 - trc sum_i |w_t,i - w_t-1,i|) - 1. The first month is charged
/// against an empty book unless `charge_first` is false.
std::vector<double> net_of_cost_returns(std::span<const double> returns, const RowMatrix& weights,
                                        double trc = 0.0035, bool charge_first = true);

/// (mu_Aug / sigma_Aug) sigma_F - mu_F.
double return_loss(std::span<const double> net_factor, std::span<const double> net_aug);

struct SeriesPerf {
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> sharpe;
  std::optional<double> downside_sharpe;
  std::optional<double> up_ratio;
};

struct PerfOptions {
  std::vector<double> alphas{0.2, 0.4, 0.6};  // beta = alpha
  double gamma = 2.25;
  double trc = 0.0035;
  bool charge_first = true;
};

struct PerfReport {
  SeriesPerf factor;
  SeriesPerf aug;
  std::optional<double> return_loss;
  std::vector<std::pair<double, double>> opportunity_cost;  // (alpha, theta)
};

/// `rf` is the risk-free series aligned with the track; empty means zero.
PerfReport perf_report(const BacktestTrack& track, std::span<const double> rf = {}, const PerfOptions& options = {});

void write_perf_csv(const PerfReport& report, std::ostream& out);

}  // namespace pspan
