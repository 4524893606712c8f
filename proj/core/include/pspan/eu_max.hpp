#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pspan/lp.hpp"
#include "pspan/returns.hpp"
#include "pspan/utility_grid.hpp"

namespace pspan {

/// Long-only, fully invested portfolios restricted to a subset of the
/// panel's columns: a face of the unit simplex.
struct PortfolioSet {
  std::vector<std::string> universe;
  std::vector<std::size_t> allowed;  // ascending, unique, nonempty

  static PortfolioSet all(const ReturnPanel& panel);
  static PortfolioSet of(const ReturnPanel& panel, std::span<const std::string> labels);
  static PortfolioSet of_indices(const ReturnPanel& panel, std::vector<std::size_t> indices);

  std::size_t size() const noexcept { return allowed.size(); }
  bool contains(std::size_t index) const;
  bool subset_of(const PortfolioSet& other) const;
  /// Unit portfolio on the k-th allowed asset, over the whole universe.
  std::vector<double> vertex(std::size_t k) const;
};

enum class SolveStatus {
  optimal,
  degenerate,  // the utility's knot grid collapsed to zero; treated as v == 0
};

struct EuSolution {
  double value = 0.0;           // expected utility, return units
  std::vector<double> weights;  // over the whole universe
  SolveStatus status = SolveStatus::optimal;
};

struct EuOptions {
  /// Optional feasible starting portfolio (full universe); the result is
  /// never worse than it.
  std::optional<std::vector<double>> warm_start;
  /// Gap beyond which a concave solve is rejected.
  double acceptance_gap = 1e-8;
  std::size_t max_iterations = 20000;
  /// Largest vertex count the exact clamped-mode search will enumerate.
  std::size_t clamped_vertex_cap = 5'000'000;
};

/// (1/T) sum_t u(w'Y_t).
double expected_utility(const ReturnPanel& panel, std::span<const double> weights,
                        const PiecewiseUtility& u, EvalMode mode);

/// Largest expected utility of a positive-side (concave) member over the
/// set, in paper mode. Solved as the hypograph LP with one variable per
/// month; the monthly variables are aggregated and the LP rows generated
/// on demand, which is exact for polyhedral objectives.
EuSolution max_eu_concave(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                          const EuOptions& options = {});

/// Largest expected utility of a negative-side (convex) member over the
/// set, in paper mode. A convex objective peaks at a vertex of the face,
/// so single-asset portfolios are compared directly (lowest index wins ties).
EuSolution max_eu_convex(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u);

/// Exact maximum in clamped mode, where the objective is neither convex
/// nor concave: every vertex of the arrangement cut out of the face by the
/// hyperplanes w'Y_t = breakpoint is examined.
EuSolution max_eu_clamped(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                          const EuOptions& options = {});

/// Dispatches on side and mode.
EuSolution max_expected_utility(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                                EvalMode mode, const EuOptions& options = {});

/// Brute force over the simplex grid of mesh `step` (at most 4 assets).
double grid_oracle(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u, double step,
                   EvalMode mode);

/// Every grid point on the face with mesh `step`, over the whole universe.
std::vector<std::vector<double>> simplex_grid(const PortfolioSet& set, double step);

/// The full hypograph LP for a positive-side member: maximize (1/T) sum y_t
/// subject to y_t <= piece_j(w'Y_t) for every month and piece, weights on
/// the face.
lp::LinearProgram assemble_concave_lp(const ReturnPanel& panel, const PortfolioSet& set,
                                      const PiecewiseUtility& u);

}  // namespace pspan
