#include "pspan/spanning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pspan/errors.hpp"
#include "pspan/parallel.hpp"

namespace pspan {

void GridParams::validate() const {
  if (n1 < 2 || n2 < 2 || p1 < 2 || p2 < 2) throw ValidationError("grid values must be at least 2");
}

namespace {

bool same_column(const ReturnPanel& panel, std::size_t a, std::size_t b) {
  for (std::size_t t = 0; t < panel.periods(); ++t) {
    if (panel(t, a) != panel(t, b)) return false;
  }
  return true;
}

/// L without columns that repeat, bit for bit, a column already offered
/// (K's columns count first). Such columns add no portfolios.
PortfolioSet effective_set(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L) {
  std::vector<std::size_t> kept = K.allowed;
  for (std::size_t j : L.allowed) {
    if (K.contains(j)) continue;
    const bool repeat = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) { return same_column(panel, j, k); });
    if (!repeat) kept.push_back(j);
  }
  return PortfolioSet::of_indices(panel, std::move(kept));
}

struct Slot {
  double difference = 0.0;
  std::vector<double> lambda;
  std::vector<double> kappa;
};

/// Shared driver: `solve_k` returns the K-side solution for a member.
/// `K_face` lists the columns K already offers, when K is a face.
template <typename SolveK>
SpanningResult compute(const ReturnPanel& panel, const PortfolioSet* K_face, const PortfolioSet& L,
                       const GridParams& grid, const StatOptions& options, SolveK&& solve_k) {
  grid.validate();
  const UtilityFamily negative = build_family(
      options.negative_knots ? *options.negative_knots : build_knots(panel, Side::negative, grid.n1), grid.n2);
  const UtilityFamily positive = build_family(
      options.positive_knots ? *options.positive_knots : build_knots(panel, Side::positive, grid.p1), grid.p2);
  const std::size_t n_neg = negative.members.size();
  const std::size_t total = n_neg + positive.members.size();
  auto member = [&](std::size_t i) -> const PiecewiseUtility& {
    return i < n_neg ? negative.members[i] : positive.members[i - n_neg];
  };

  const PortfolioSet L_eff = K_face ? effective_set(panel, *K_face, L) : L;
  const bool no_expansion = K_face && L_eff.allowed == K_face->allowed;

  SpanningResult result;
  result.negative_count = n_neg;
  result.per_utility.assign(total, 0.0);

  if (no_expansion) {
    const EuSolution k = solve_k(member(0));
    result.kappa_star = k.weights;
    result.lambda_star = k.weights;
    return result;
  }

  std::vector<Slot> slots(total);
  parallel_for(total, options.jobs, [&](std::size_t i) {
    const PiecewiseUtility& u = member(i);
    const EuSolution k = solve_k(u);
    Slot& s = slots[i];
    s.kappa = k.weights;
    if (k.status == SolveStatus::degenerate) {
      s.lambda = k.weights;
      return;
    }
    EuOptions eu;
    eu.warm_start = k.weights;
    const EuSolution l = max_expected_utility(panel, L_eff, u, options.mode, eu);
    // The L face contains K, so the true gap is nonnegative; clamp rounding.
    s.difference = std::max(0.0, l.value - k.value);
    s.lambda = s.difference > 0.0 ? l.weights : k.weights;
  });

  std::size_t best = 0;
  for (std::size_t i = 0; i < total; ++i) {
    result.per_utility[i] = slots[i].difference;
    if (slots[i].difference > slots[best].difference) best = i;
  }
  result.rho = std::sqrt(static_cast<double>(panel.periods())) * slots[best].difference;
  result.side = best < n_neg ? Side::negative : Side::positive;
  result.utility_index = best < n_neg ? best : best - n_neg;
  result.kappa_star = std::move(slots[best].kappa);
  result.lambda_star = std::move(slots[best].lambda);
  return result;
}

}  // namespace

SpanningResult rho_star(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                        const GridParams& grid, const StatOptions& options) {
  if (!K.subset_of(L)) throw ValidationError("K must be a subset of L");
  if (L.universe != panel.assets()) throw ValidationError("portfolio sets do not match the panel");
  return compute(panel, &K, L, grid, options, [&](const PiecewiseUtility& u) {
    return max_expected_utility(panel, K, u, options.mode);
  });
}

SpanningResult super_efficiency_stat(const ReturnPanel& panel, std::span<const double> kappa,
                                     const PortfolioSet& L, const GridParams& grid,
                                     const StatOptions& options) {
  if (L.universe != panel.assets()) throw ValidationError("portfolio set does not match the panel");
  if (kappa.size() != panel.n_assets()) throw ValidationError("kappa has the wrong length");
  double mass = 0.0;
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] >= 0.0)) throw ValidationError("kappa must be nonnegative");
    if (kappa[i] > 0.0) {
      if (!L.contains(i)) throw ValidationError("kappa puts weight outside L");
      support.push_back(i);
    }
    mass += kappa[i];
  }
  if (std::abs(mass - 1.0) > 1e-9) throw ValidationError("kappa must sum to one");
  const std::vector<double> k(kappa.begin(), kappa.end());
  auto evaluate_k = [&](const PiecewiseUtility& u) {
    return EuSolution{expected_utility(panel, k, u, options.mode), k,
                      u.grid().degenerate() ? SolveStatus::degenerate : SolveStatus::optimal};
  };
  if (support.size() == 1) {
    const PortfolioSet K = PortfolioSet::of_indices(panel, support);
    return compute(panel, &K, L, grid, options, evaluate_k);
  }
  return compute(panel, nullptr, L, grid, options, evaluate_k);
}

double rho_definition(const ReturnPanel& panel, const PortfolioSet& K, const PortfolioSet& L,
                      const GridOracleConfig& cfg) {
  if (!K.subset_of(L)) throw ValidationError("K must be a subset of L");
  if (L.size() > 3) throw ValidationError("the definition oracle handles at most 3 assets in L");
  if (cfg.z_count < 2) throw ValidationError("z grid needs at least 2 points");
  if (!(cfg.lambda_step > 0.0 && cfg.lambda_step <= 1.0)) throw ValidationError("lambda step must lie in (0, 1]");

  const std::size_t periods = panel.periods();
  auto portfolio_returns = [&](const std::vector<std::vector<double>>& points) {
    std::vector<std::vector<double>> out;
    out.reserve(points.size());
    for (const auto& w : points) {
      std::vector<double> x(periods, 0.0);
      for (std::size_t t = 0; t < periods; ++t) {
        const auto row = panel.row(t);
        for (std::size_t i = 0; i < row.size(); ++i) x[t] += w[i] * row[i];
      }
      out.push_back(std::move(x));
    }
    return out;
  };
  const auto lambda_x = portfolio_returns(simplex_grid(L, cfg.lambda_step));
  const auto kappa_x = portfolio_returns(simplex_grid(K, cfg.lambda_step));

  const double inv_t = 1.0 / static_cast<double>(periods);
  // J(z, 0) for the loss branch and J(0, z) for the gain branch.
  auto j_loss = [&](double z, const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += std::max(z, std::min(v, 0.0));
    return -s * inv_t;
  };
  auto j_gain = [&](double z, const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += z - std::min(std::max(v, 0.0), z);
    return s * inv_t;
  };

  double best = -std::numeric_limits<double>::infinity();
  auto saddle = [&](auto&& j, double z) {
    std::vector<double> jk(kappa_x.size());
    for (std::size_t k = 0; k < kappa_x.size(); ++k) jk[k] = j(z, kappa_x[k]);
    for (const auto& x : lambda_x) {
      const double jl = j(z, x);
      double worst = std::numeric_limits<double>::infinity();
      for (double v : jk) worst = std::min(worst, v - jl);
      best = std::max(best, worst);
    }
  };
  for (double z : build_knots(panel, Side::negative, cfg.z_count).knots) saddle(j_loss, z);
  for (double z : build_knots(panel, Side::positive, cfg.z_count).knots) saddle(j_gain, z);
  return std::sqrt(static_cast<double>(periods)) * best;
}

}  // namespace pspan
