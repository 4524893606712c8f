#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pspan/returns.hpp"
#include "pspan/spanning.hpp"

namespace pspan {

/// Out-of-sample record of the factor-only (K) and augmented (L) strategies.
struct BacktestTrack {
  std::vector<std::string> assets;  // universe of the weight columns
  std::vector<std::string> dates;   // months the returns were realized in
  std::vector<double> r_factor;
  std::vector<double> r_aug;
  RowMatrix w_factor;  // one row per month, held during that month
  RowMatrix w_aug;
  std::vector<double> rho;  // in-sample statistic of each fitting window

  std::size_t size() const noexcept { return dates.size(); }
};

struct BacktestOptions {
  std::size_t window = 300;
  GridParams grid;
  StatOptions stat;  // stat.jobs parallelizes across windows
};

/// Rolls a fitting window one month at a time; each month holds the
/// portfolios that attain the statistic on the preceding `window` months.
BacktestTrack run_backtest(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                           const BacktestOptions& options = {});

double realized_return(std::span<const double> weights, std::span<const double> returns);

struct WeightStats {
  std::string portfolio;  // "factor" or "aug"
  std::string asset;
  SeriesStats stats;
};

/// Summary statistics of each asset's weight path, factor portfolio first.
std::vector<WeightStats> weight_stats(const BacktestTrack& track);

void write_track_csv(const BacktestTrack& track, std::ostream& out);
void write_weight_stats_csv(const std::vector<WeightStats>& stats, std::ostream& out);

}  // namespace pspan
