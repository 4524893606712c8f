#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pspan/eu_max.hpp"
#include "pspan/returns.hpp"
#include "pspan/utility_grid.hpp"

namespace pspan {

/// Knot counts and weight levels of the two utility families.
struct GridParams {
  int n1 = 10;  // knots on the loss side
  int n2 = 5;   // weight levels on the loss side
  int p1 = 10;  // knots on the gain side
  int p2 = 5;   // weight levels on the gain side

  void validate() const;
};

struct StatOptions {
  EvalMode mode = EvalMode::paper;
  int jobs = 1;
  /// Knots to use instead of the panel's own range (frozen-grid runs).
  std::optional<KnotGrid> negative_knots;
  std::optional<KnotGrid> positive_knots;
};

struct SpanningResult {
  double rho = 0.0;  // scaled by sqrt(T)
  Side side = Side::negative;
  std::size_t utility_index = 0;  // within the family of `side`
  std::vector<double> lambda_star;  // over the whole universe
  std::vector<double> kappa_star;
  /// sup over L minus sup over K, unscaled; loss family first.
  std::vector<double> per_utility;
  std::size_t negative_count = 0;  // members of the loss family in per_utility
};

/// sqrt(T) times the largest gain in expected utility from moving from K
/// to L, over both utility families. Ties go to the loss family, then to
/// the lowest member index.
SpanningResult rho_star(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                        const GridParams& grid = {}, const StatOptions& options = {});

/// The statistic with K the single portfolio `kappa`.
SpanningResult super_efficiency_stat(const ReturnPanel& panel, std::span<const double> kappa,
                                     const PortfolioSet& L, const GridParams& grid = {},
                                     const StatOptions& options = {});

struct GridOracleConfig {
  int z_count = 10;
  double lambda_step = 0.05;
};

/// Brute-force saddle form: sqrt(T) max over the ramp thresholds z and the
/// grid portfolios of L of the smallest shortfall over the grid portfolios
/// of K. For small instances only (|L| <= 3).
double rho_definition(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                      const GridOracleConfig& cfg);

}  // namespace pspan
