#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pspan/errors.hpp"
#include "pspan/eu_max.hpp"

namespace pspan {
namespace {

double direct_eu(const ReturnPanel& p, const std::vector<double>& w, const PiecewiseUtility& u, EvalMode mode) {
  double s = 0.0;
  for (std::size_t t = 0; t < p.periods(); ++t) {
    double x = 0.0;
    for (std::size_t i = 0; i < p.n_assets(); ++i) x += w[i] * p(t, i);
    s += u.value(x, mode);
  }
  return s / static_cast<double>(p.periods());
}

/// Largest |(w - w')'Y_t| per unit of L1 distance / 2, the Lipschitz constant
/// of expected utility on the simplex.
double lipschitz(const ReturnPanel& p) {
  double l = 0.0;
  for (std::size_t t = 0; t < p.periods(); ++t) {
    const auto r = p.row(t);
    l = std::max(l, *std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end()));
  }
  return l;
}

TEST(PortfolioSet, Construction) {
  const auto p = test::make_panel({{0.1, 0.2, 0.3}, {0.0, 0.1, 0.2}});
  const std::vector<std::string> labels{"C", "A"};
  const auto s = PortfolioSet::of(p, labels);
  EXPECT_EQ(s.allowed, (std::vector<std::size_t>{0, 2}));
  EXPECT_TRUE(s.subset_of(PortfolioSet::all(p)));
  EXPECT_FALSE(PortfolioSet::all(p).subset_of(s));
  EXPECT_EQ(s.vertex(1), (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_THROW(PortfolioSet::of_indices(p, {}), ValidationError);
  EXPECT_THROW(PortfolioSet::of_indices(p, {5}), ValidationError);
}

TEST(MaxEuConcave, SingletonSet) {
  std::mt19937_64 rng(1);
  const auto p = test::random_panel(rng, 8, 2);
  const auto fam = build_family(p, Side::positive, 4, 3);
  const auto set = PortfolioSet::of_indices(p, {1});
  for (const auto& u : fam.members) {
    const auto s = max_eu_concave(p, set, u);
    EXPECT_EQ(s.weights, (std::vector<double>{0.0, 1.0}));
    EXPECT_NEAR(s.value, direct_eu(p, s.weights, u, EvalMode::paper), 1e-15);
  }
}

TEST(MaxEuConcave, LinearMemberPicksBestMean) {
  // All weight on the top knot: v(x) = min(x, xbar) = x on the data.
  const auto p = test::make_panel({{0.01, 0.03}, {0.02, -0.01}, {0.05, 0.04}, {-0.02, 0.02}});
  const auto grid = build_knots(p, Side::positive, 4);
  const PiecewiseUtility u(grid, {0, 0, 0, 1}, 1);
  const auto s = max_eu_concave(p, PortfolioSet::all(p), u);
  EXPECT_NEAR(s.value, 0.02, 1e-15);  // mean of B
  EXPECT_NEAR(s.weights[1], 1.0, 1e-12);
}

TEST(MaxEuConcave, MatchesFullLpAndGridOracle) {
  std::mt19937_64 rng(2);
  for (int inst = 0; inst < 30; ++inst) {
    const auto p = test::random_panel(rng, 4 + inst % 8, 2 + inst % 2);
    const auto set = PortfolioSet::all(p);
    const double slack = 1e-6 + lipschitz(p) * 0.01;
    for (const auto& u : build_family(p, Side::positive, 4, 3).members) {
      const auto s = max_eu_concave(p, set, u);
      const auto full = lp::solve(assemble_concave_lp(p, set, u));
      ASSERT_EQ(full.status, lp::Status::optimal);
      EXPECT_NEAR(s.value, full.objective, 1e-12);
      EXPECT_LT(full.duality_gap, 1e-8);
      const double grid = grid_oracle(p, set, u, 0.01, EvalMode::paper);
      EXPECT_GE(s.value, grid - 1e-12);
      EXPECT_LE(s.value - grid, slack);
      // Reported weights reproduce the value.
      EXPECT_NEAR(direct_eu(p, s.weights, u, EvalMode::paper), s.value, 1e-8);
      double mass = 0.0;
      for (double w : s.weights) {
        EXPECT_GE(w, 0.0);
        mass += w;
      }
      EXPECT_NEAR(mass, 1.0, 1e-9);
    }
  }
}

TEST(MaxEuConcave, AtLeastEveryVertexAndWarmStart) {
  std::mt19937_64 rng(4);
  const auto p = test::random_panel(rng, 12, 3);
  const auto set = PortfolioSet::all(p);
  for (const auto& u : build_family(p, Side::positive, 5, 3).members) {
    EuOptions opt;
    opt.warm_start = std::vector<double>{0.2, 0.3, 0.5};
    const auto s = max_eu_concave(p, set, u, opt);
    for (std::size_t k = 0; k < set.size(); ++k) {
      EXPECT_GE(s.value, direct_eu(p, set.vertex(k), u, EvalMode::paper));
    }
    EXPECT_GE(s.value, direct_eu(p, *opt.warm_start, u, EvalMode::paper));
  }
}

TEST(MaxEuConvex, SingletonAndDominance) {
  const auto p = test::make_panel({{0.01, 0.00}, {-0.02, -0.03}, {0.03, 0.02}});
  const auto fam = build_family(p, Side::negative, 4, 3);
  for (const auto& u : fam.members) {
    const auto single = max_eu_convex(p, PortfolioSet::of_indices(p, {1}), u);
    EXPECT_NEAR(single.value, direct_eu(p, {0.0, 1.0}, u, EvalMode::paper), 1e-15);
    // A statewise dominates B: A always attains the maximum.
    const auto both = max_eu_convex(p, PortfolioSet::all(p), u);
    EXPECT_EQ(both.weights, (std::vector<double>{1.0, 0.0}));
  }
}

TEST(MaxEuConvex, VertexBeatsGrid) {
  std::mt19937_64 rng(6);
  for (int inst = 0; inst < 20; ++inst) {
    const auto p = test::random_panel(rng, 5, 3);
    const auto set = PortfolioSet::all(p);
    for (const auto& u : build_family(p, Side::negative, 4, 3).members) {
      const auto s = max_eu_convex(p, set, u);
      double best_vertex = -1e300;
      for (std::size_t k = 0; k < 3; ++k) best_vertex = std::max(best_vertex, direct_eu(p, set.vertex(k), u, EvalMode::paper));
      EXPECT_EQ(s.value, best_vertex);
      for (const auto& w : simplex_grid(set, 0.05)) EXPECT_GE(s.value, direct_eu(p, w, u, EvalMode::paper) - 1e-15);
    }
  }
}

TEST(MaxEuConvex, TiesGoToLowestIndex) {
  const auto p = test::make_panel({{0.01, 0.01}, {-0.02, -0.02}});
  const auto fam = build_family(p, Side::negative, 3, 3);
  for (const auto& u : fam.members) EXPECT_EQ(max_eu_convex(p, PortfolioSet::all(p), u).weights[0], 1.0);
}

TEST(MaxEuClamped, MatchesFineGrid) {
  std::mt19937_64 rng(8);
  for (int inst = 0; inst < 15; ++inst) {
    const auto p = test::random_panel(rng, 6, 2 + inst % 2);
    const auto set = PortfolioSet::all(p);
    const double slack = 1e-6 + lipschitz(p) * 0.01;
    for (Side side : {Side::negative, Side::positive}) {
      for (const auto& u : build_family(p, side, 4, 3).members) {
        const auto s = max_eu_clamped(p, set, u);
        const double grid = grid_oracle(p, set, u, 0.01, EvalMode::clamped);
        EXPECT_GE(s.value, grid - 1e-12);
        EXPECT_LE(s.value - grid, slack);
        EXPECT_NEAR(direct_eu(p, s.weights, u, EvalMode::clamped), s.value, 1e-12);
      }
    }
  }
}

TEST(MaxEu, MonotoneInTheSet) {
  std::mt19937_64 rng(9);
  const auto p = test::random_panel(rng, 10, 3);
  const auto small = PortfolioSet::of_indices(p, {0, 2});
  const auto big = PortfolioSet::all(p);
  for (Side side : {Side::negative, Side::positive}) {
    for (const auto& u : build_family(p, side, 5, 3).members) {
      for (EvalMode mode : {EvalMode::paper, EvalMode::clamped}) {
        EXPECT_LE(max_expected_utility(p, small, u, mode).value, max_expected_utility(p, big, u, mode).value + 1e-12);
      }
    }
  }
}

TEST(MaxEu, ScalingEquivariance) {
  std::mt19937_64 rng(10);
  const auto p = test::random_panel(rng, 10, 3);
  const auto set = PortfolioSet::all(p);
  for (double c : {0.5, 2.0, 10.0}) {
    const auto q = p.scaled(c);
    for (Side side : {Side::negative, Side::positive}) {
      const auto fp = build_family(p, side, 5, 3), fq = build_family(q, side, 5, 3);
      for (std::size_t i = 0; i < fp.members.size(); ++i) {
        const double a = max_expected_utility(p, set, fp.members[i], EvalMode::paper).value;
        const double b = max_expected_utility(q, set, fq.members[i], EvalMode::paper).value;
        EXPECT_NEAR(b, c * a, 1e-12 * c);
      }
    }
  }
}

TEST(MaxEu, DegenerateGrid) {
  const auto p = test::make_panel({{0.01, 0.02}, {0.03, 0.01}});
  const auto fam = build_family(p, Side::negative, 4, 3);
  const auto s = max_expected_utility(p, PortfolioSet::all(p), fam.members[0], EvalMode::paper);
  EXPECT_EQ(s.status, SolveStatus::degenerate);
  EXPECT_EQ(s.value, 0.0);
}

TEST(GridOracle, Basics) {
  const auto p = test::make_panel({{0.01, 0.03}, {-0.02, 0.01}});
  const auto u = build_family(p, Side::positive, 3, 3).members[2];
  const auto one = PortfolioSet::of_indices(p, {0});
  EXPECT_NEAR(grid_oracle(p, one, u, 0.1, EvalMode::paper), direct_eu(p, {1.0, 0.0}, u, EvalMode::paper), 1e-15);
  const double v = grid_oracle(p, PortfolioSet::all(p), u, 1.0, EvalMode::paper);
  EXPECT_EQ(v, std::max(direct_eu(p, {1.0, 0.0}, u, EvalMode::paper), direct_eu(p, {0.0, 1.0}, u, EvalMode::paper)));
  EXPECT_EQ(simplex_grid(PortfolioSet::all(p), 0.01).size(), 101u);
  std::vector<std::vector<double>> rows(3, std::vector<double>(5, 0.01));
  const auto wide = test::make_panel(rows);
  EXPECT_THROW(grid_oracle(wide, PortfolioSet::all(wide), build_family(wide, Side::positive, 3, 3).members[0], 0.5,
                           EvalMode::paper),
               ValidationError);
}

TEST(ConcaveLp, DumpReplays) {
  const auto p = test::make_panel({{0.01, 0.03}, {-0.02, 0.01}});
  const auto u = build_family(p, Side::positive, 3, 3).members[1];
  const auto prog = assemble_concave_lp(p, PortfolioSet::all(p), u);
  EXPECT_EQ(prog.rows.size(), 2 * u.pieces().size() + 1);
  EXPECT_NE(lp::to_canonical_text(prog).find("budget"), std::string::npos);
}

}  // namespace
}  // namespace pspan
