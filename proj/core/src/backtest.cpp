#include "pspan/backtest.hpp"

#include <ostream>

#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"
#include "pspan/parallel.hpp"

namespace pspan {

double realized_return(std::span<const double> weights, std::span<const double> returns) {
  if (weights.size() != returns.size()) throw ValidationError("weights and returns differ in length");
  double r = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) r += weights[i] * returns[i];
  return r;
}

BacktestTrack run_backtest(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                           const BacktestOptions& options) {
  if (options.window < 2) throw ValidationError("window must be at least 2");
  if (panel.periods() < options.window + 1) {
    throw ValidationError("backtest needs at least window + 1 = " + std::to_string(options.window + 1) +
                          " months, got " + std::to_string(panel.periods()));
  }
  const std::size_t months = panel.periods() - options.window;
  const auto n = static_cast<Eigen::Index>(panel.n_assets());

  BacktestTrack track;
  track.assets = panel.assets();
  track.dates.resize(months);
  track.r_factor.resize(months);
  track.r_aug.resize(months);
  track.rho.resize(months);
  track.w_factor.resize(static_cast<Eigen::Index>(months), n);
  track.w_aug.resize(static_cast<Eigen::Index>(months), n);

  StatOptions inner = options.stat;
  inner.jobs = 1;
  parallel_for(months, options.stat.jobs, [&](std::size_t k) {
    const std::size_t m = options.window + k;
    const SpanningResult fit = rho_star(window(panel, m - options.window, options.window), K, L, options.grid, inner);
    // No gain from L on this window: the augmented investor holds kappa*.
    const std::vector<double>& lambda = fit.rho > 0.0 ? fit.lambda_star : fit.kappa_star;
    const auto row = panel.row(m);
    track.dates[k] = panel.dates()[m];
    track.r_factor[k] = realized_return(fit.kappa_star, row);
    track.r_aug[k] = realized_return(lambda, row);
    track.rho[k] = fit.rho;
    for (Eigen::Index i = 0; i < n; ++i) {
      track.w_factor(static_cast<Eigen::Index>(k), i) = fit.kappa_star[static_cast<std::size_t>(i)];
      track.w_aug(static_cast<Eigen::Index>(k), i) = lambda[static_cast<std::size_t>(i)];
    }
  });
  return track;
}

std::vector<WeightStats> weight_stats(const BacktestTrack& track) {
  if (track.size() == 0) throw ValidationError("empty backtest track");
  std::vector<WeightStats> out;
  auto add = [&](const char* name, const RowMatrix& w) {
    for (Eigen::Index i = 0; i < w.cols(); ++i) {
      std::vector<double> path;
      path.reserve(static_cast<std::size_t>(w.rows()));
      for (Eigen::Index t = 0; t < w.rows(); ++t) path.push_back(w(t, i));
      SeriesStats s;
      if (path.size() >= 2) {
        s = summary_stats(path);
      } else {
        s.mean = path.front();
      }
      out.push_back({name, track.assets[static_cast<std::size_t>(i)], s});
    }
  };
  add("factor", track.w_factor);
  add("aug", track.w_aug);
  return out;
}

void write_track_csv(const BacktestTrack& track, std::ostream& out) {
  std::vector<std::string> header{"date", "r_factor", "r_aug", "rho"};
  for (const auto& a : track.assets) header.push_back("w_factor_" + a);
  for (const auto& a : track.assets) header.push_back("w_aug_" + a);
  csv::write_row(out, header);
  for (std::size_t k = 0; k < track.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    std::vector<std::string> fields{track.dates[k], csv::format_exact(track.r_factor[k]),
                                    csv::format_exact(track.r_aug[k]), csv::format_exact(track.rho[k])};
    for (Eigen::Index i = 0; i < track.w_factor.cols(); ++i) fields.push_back(csv::format_exact(track.w_factor(row, i)));
    for (Eigen::Index i = 0; i < track.w_aug.cols(); ++i) fields.push_back(csv::format_exact(track.w_aug(row, i)));
    csv::write_row(out, fields);
  }
}

void write_weight_stats_csv(const std::vector<WeightStats>& stats, std::ostream& out) {
  csv::write_row(out, {"portfolio", "asset", "mean", "sd", "skewness", "kurtosis"});
  auto opt = [](const std::optional<double>& v) { return v ? csv::format_exact(*v) : std::string("NA"); };
  for (const auto& s : stats) {
    csv::write_row(out, {s.portfolio, s.asset, csv::format_exact(s.stats.mean), csv::format_exact(s.stats.sd),
                         opt(s.stats.skewness), opt(s.stats.kurtosis)});
  }
}

}  // namespace pspan
