#include "pspan/utility_grid.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"

namespace pspan {

std::string_view to_string(Side side) {
  return side == Side::negative ? "negative" : "positive";
}

std::string_view to_string(EvalMode mode) {
  return mode == EvalMode::paper ? "paper" : "clamped";
}

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "paper") return EvalMode::paper;
  if (text == "clamped") return EvalMode::clamped;
  throw ValidationError("unknown evaluation mode '" + std::string(text) + "'");
}

bool KnotGrid::degenerate() const {
  return std::all_of(knots.begin(), knots.end(), [](double z) { return z == 0.0; });
}

KnotGrid make_knots(Side side, double extreme, int count) {
  if (count < 2) throw ValidationError("a knot grid needs at least two knots");
  KnotGrid grid{side, std::vector<double>(static_cast<std::size_t>(count))};
  const double span = count - 1;
  for (int k = 0; k < count; ++k) {
    const double frac = k / span;
    grid.knots[static_cast<std::size_t>(k)] =
        side == Side::negative ? extreme - frac * extreme : frac * extreme;
  }
  return grid;
}

KnotGrid build_knots(const ReturnPanel& panel, Side side, int count,
                     std::span<const std::size_t> columns) {
  double extreme = 0.0;
  for (std::size_t t = 0; t < panel.periods(); ++t) {
    for (std::size_t i : columns) {
      const double y = panel(t, i);
      extreme = side == Side::negative ? std::min(extreme, y) : std::max(extreme, y);
    }
  }
  return make_knots(side, extreme, count);
}

KnotGrid build_knots(const ReturnPanel& panel, Side side, int count) {
  std::vector<std::size_t> all(panel.n_assets());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return build_knots(panel, side, count, all);
}

std::uint64_t family_size(int k_knots, int k_levels) {
  if (k_knots < 2 || k_levels < 2) throw ValidationError("grid sizes must be at least 2");
  // C(n, r) with n = k_knots + k_levels - 2 and r = min(k_knots - 1, k_levels - 1).
  const std::uint64_t n = static_cast<std::uint64_t>(k_knots) + k_levels - 2;
  const std::uint64_t r = static_cast<std::uint64_t>(std::min(k_knots, k_levels) - 1);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // c * (n - r + i) is divisible by i; split the division to delay overflow.
    const std::uint64_t g = std::gcd(c, i);
    const std::uint64_t factor = (n - r + i) / (i / g);
    if (__builtin_mul_overflow(c / g, factor, &c)) throw ValidationError("utility family size overflows");
  }
  return c;
}

std::vector<LevelVector> enumerate_weights(int k_knots, int k_levels, std::uint64_t cap) {
  const std::uint64_t total = family_size(k_knots, k_levels);
  if (total > cap) {
    throw ValidationError("utility family of " + std::to_string(total) + " members exceeds the cap of " +
                          std::to_string(cap));
  }
  const int budget = k_levels - 1;
  std::vector<LevelVector> out;
  out.reserve(static_cast<std::size_t>(total));
  LevelVector current(static_cast<std::size_t>(k_knots), 0);

  // Ascending lexicographic: earlier positions vary slowest.
  auto fill = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos + 1 == current.size()) {
      current[pos] = remaining;
      out.push_back(current);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      current[pos] = v;
      self(self, pos + 1, remaining - v);
    }
    current[pos] = 0;
  };
  fill(fill, 0, budget);
  return out;
}

PiecewiseUtility::PiecewiseUtility(KnotGrid grid, LevelVector levels, int denominator)
    : grid_(std::move(grid)), levels_(std::move(levels)), denominator_(denominator) {
  const std::size_t k = grid_.knots.size();
  if (k < 2 || levels_.size() != k) throw ValidationError("weights and knots differ in length");
  if (denominator_ < 1) throw ValidationError("weight denominator must be positive");
  int total = 0;
  for (int v : levels_) {
    if (v < 0) throw ValidationError("negative utility weight");
    total += v;
  }
  if (total != denominator_) throw ValidationError("utility weights must sum to one");

  c1_.assign(k, 0.0);
  c0_.assign(k, 0.0);
  int tail_levels = 0;
  double tail_c0 = 0.0;
  for (std::size_t m = k; m-- > 0;) {
    tail_levels += levels_[m];
    tail_c0 += weight(m) * grid_.knots[m];
    c1_[m] = static_cast<double>(tail_levels) / denominator_;
    c0_[m] = tail_c0;
  }

  for (std::size_t m = 0; m < k; ++m) {
    if (levels_[m] > 0 || m + 1 == k) active_.push_back(m);
    if (levels_[m] > 0) {
      term_knots_.push_back(grid_.knots[m]);
      term_weights_.push_back(weight(m));
    }
  }

  // Piece j covers the stretch between knot j-1 and knot j; a new piece
  // starts right after every knot that carries weight.
  auto piece = [&](std::size_t j) {
    const double tail_weight = j < k ? c1_[j] : 0.0;
    const double tail = j < k ? c0_[j] : 0.0;
    if (grid_.side == Side::positive) return Line{tail_weight, c0_[0] - tail};
    return Line{1.0 - tail_weight, tail};
  };
  pieces_.push_back(piece(0));
  for (std::size_t m = 0; m < k; ++m) {
    if (levels_[m] > 0) pieces_.push_back(piece(m + 1));
  }
}

std::vector<double> PiecewiseUtility::weights() const {
  std::vector<double> w(levels_.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = weight(m);
  return w;
}

std::vector<double> PiecewiseUtility::breakpoints(EvalMode mode) const {
  std::vector<double> points = term_knots_;
  if (mode == EvalMode::clamped) points.push_back(0.0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double PiecewiseUtility::value(double x, EvalMode mode) const {
  const bool negative = grid_.side == Side::negative;
  if (mode == EvalMode::clamped) x = negative ? std::min(x, 0.0) : std::max(x, 0.0);
  double v = 0.0;
  if (negative) {
    for (std::size_t m = 0; m < term_knots_.size(); ++m) v += term_weights_[m] * std::max(x, term_knots_[m]);
  } else {
    for (std::size_t m = 0; m < term_knots_.size(); ++m) v += term_weights_[m] * std::min(x, term_knots_[m]);
  }
  return v;
}

double eval_utility(const PiecewiseUtility& u, double x, EvalMode mode) { return u.value(x, mode); }

UtilityFamily build_family(KnotGrid grid, int k_levels) {
  const auto weight_sets = enumerate_weights(static_cast<int>(grid.knots.size()), k_levels);
  UtilityFamily family{grid.side, grid, k_levels, {}};
  family.members.reserve(weight_sets.size());
  for (const auto& levels : weight_sets) family.members.emplace_back(grid, levels, k_levels - 1);
  return family;
}

UtilityFamily build_family(const ReturnPanel& panel, Side side, int k_knots, int k_levels) {
  return build_family(build_knots(panel, side, k_knots), k_levels);
}

void write_family_csv(const UtilityFamily& family, std::ostream& out) {
  const std::size_t k = family.grid.knots.size();
  std::vector<std::string> header{"side", "index"};
  for (std::size_t m = 0; m < k; ++m) header.push_back("w" + std::to_string(m + 1));
  for (std::size_t m = 0; m < k; ++m) header.push_back("c0_" + std::to_string(m + 1));
  for (std::size_t m = 0; m < k; ++m) header.push_back("c1_" + std::to_string(m + 1));
  csv::write_row(out, header);
  for (std::size_t idx = 0; idx < family.members.size(); ++idx) {
    const auto& u = family.members[idx];
    std::vector<std::string> row{std::string(to_string(family.side)), std::to_string(idx)};
    for (std::size_t m = 0; m < k; ++m) {
      row.push_back(std::to_string(u.levels()[m]) + "/" + std::to_string(u.denominator()));
    }
    for (double c : u.c0()) row.push_back(csv::format_exact(c));
    for (double c : u.c1()) row.push_back(csv::format_exact(c));
    csv::write_row(out, row);
  }
}

}  // namespace pspan
