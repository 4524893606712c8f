#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pspan/returns.hpp"

namespace pspan {

/// Half-line a utility branch lives on: losses (convex branch) or gains
/// (concave branch).
enum class Side { negative, positive };

/// `paper` evaluates the ramp mixtures on the whole real line; `clamped`
/// first projects the argument onto the branch's half-line, which zeroes
/// out the opposite side.
enum class EvalMode { paper, clamped };

std::string_view to_string(Side side);
std::string_view to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view text);

/// Equally spaced knots on [x_min, 0] (negative side) or [0, x_max]
/// (positive side).
struct KnotGrid {
  Side side = Side::negative;
  std::vector<double> knots;

  /// True when every knot is zero (no mass on this half-line in the data).
  bool degenerate() const;
};

/// Grid of `count` knots with the given extreme (x_min <= 0 or x_max >= 0).
KnotGrid make_knots(Side side, double extreme, int count);

/// Grid spanning the most extreme loss (or gain) across all columns.
KnotGrid build_knots(const ReturnPanel& panel, Side side, int count);
KnotGrid build_knots(const ReturnPanel& panel, Side side, int count,
                     std::span<const std::size_t> columns);

/// Weight numerators on each knot; they sum to `k_levels - 1`.
using LevelVector = std::vector<int>;

/// Number of weight vectors on `k_knots` knots with `k_levels` levels,
/// C(k_knots + k_levels - 2, k_knots - 1).
std::uint64_t family_size(int k_knots, int k_levels);

/// Every weight vector in {0, 1/(k_levels-1), ..., 1}^k_knots summing to
/// one, in ascending lexicographic order of the numerators.
std::vector<LevelVector> enumerate_weights(int k_knots, int k_levels,
                                           std::uint64_t cap = 10'000'000);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double x) const { return slope * x + intercept; }
};

/// One member of a utility family: a convex mixture of ramp functions
/// max(x, z_k) (negative side) or min(x, z_k) (positive side). Weights are
/// kept as exact rationals numerator / denominator.
class PiecewiseUtility {
 public:
  PiecewiseUtility(KnotGrid grid, LevelVector levels, int denominator);

  Side side() const noexcept { return grid_.side; }
  const KnotGrid& grid() const noexcept { return grid_; }
  const LevelVector& levels() const noexcept { return levels_; }
  int denominator() const noexcept { return denominator_; }

  double weight(std::size_t k) const { return static_cast<double>(levels_[k]) / denominator_; }
  std::vector<double> weights() const;

  /// c1[k] = sum_{m >= k} w_m, c0[k] = sum_{m >= k} w_m z_m.
  const std::vector<double>& c1() const noexcept { return c1_; }
  const std::vector<double>& c0() const noexcept { return c0_; }

  /// Knots with positive weight, plus the last knot.
  const std::vector<std::size_t>& active() const noexcept { return active_; }

  /// Affine pieces of the paper-mode function: it equals the minimum of
  /// the pieces on the positive side and their maximum on the negative
  /// side. On the stretch just below knot j the positive branch is
  /// c1[j] x + c0[0] - c0[j] and the negative branch is (1 - c1[j]) x +
  /// c0[j], with c1 = c0 = 0 past the last knot. Only pieces adjacent to a
  /// weighted knot are kept.
  const std::vector<Line>& pieces() const noexcept { return pieces_; }

  /// Points where the function changes slope in the given mode.
  std::vector<double> breakpoints(EvalMode mode) const;

  double value(double x, EvalMode mode) const;

 private:
  KnotGrid grid_;
  LevelVector levels_;
  int denominator_;
  std::vector<double> c1_;
  std::vector<double> c0_;
  std::vector<std::size_t> active_;
  std::vector<Line> pieces_;
  // Nonzero terms only, for evaluation.
  std::vector<double> term_knots_;
  std::vector<double> term_weights_;
};

double eval_utility(const PiecewiseUtility& u, double x, EvalMode mode);

struct UtilityFamily {
  Side side = Side::negative;
  KnotGrid grid;
  int k_levels = 2;
  std::vector<PiecewiseUtility> members;
};

UtilityFamily build_family(KnotGrid grid, int k_levels);
UtilityFamily build_family(const ReturnPanel& panel, Side side, int k_knots, int k_levels);

/// Audit dump: one row per member with its weights, c0 and c1.
void write_family_csv(const UtilityFamily& family, std::ostream& out);

}  // namespace pspan
