#include <gtest/gtest.h>

#include <random>

#include "pspan/lp.hpp"

namespace pspan::lp {
namespace {

TEST(Simplex, TextbookMaximum) {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36.
  LinearProgram p;
  const auto x = p.add_variable("x", 3.0), y = p.add_variable("y", 5.0);
  p.add_row({{{x, 1.0}}, RowSense::less_equal, 4.0, "a"});
  p.add_row({{{y, 2.0}}, RowSense::less_equal, 12.0, "b"});
  p.add_row({{{x, 3.0}, {y, 2.0}}, RowSense::less_equal, 18.0, "c"});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-12);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 6.0, 1e-12);
  EXPECT_NEAR(s.duals[0], 0.0, 1e-12);
  EXPECT_NEAR(s.duals[1], 1.5, 1e-12);
  EXPECT_NEAR(s.duals[2], 1.0, 1e-12);
  EXPECT_LT(s.duality_gap, 1e-12);
}

TEST(Simplex, EqualityGreaterAndFree) {
  // min mu1 + 2 mu2 + max(3 mu1, mu2) over the simplex: mu = (1/4, 3/4), value 2.5.
  LinearProgram p;
  const auto m1 = p.add_variable("m1", -1.0), m2 = p.add_variable("m2", -2.0), th = p.add_variable("th", -1.0, true);
  p.add_row({{{m1, 1.0}, {m2, 1.0}}, RowSense::equal, 1.0, "sum"});
  p.add_row({{{th, 1.0}, {m1, -3.0}}, RowSense::greater_equal, 0.0, "g1"});
  p.add_row({{{th, 1.0}, {m2, -1.0}}, RowSense::greater_equal, 0.0, "g2"});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.objective, -2.5, 1e-12);
  EXPECT_NEAR(s.x[0], 0.25, 1e-12);
  EXPECT_NEAR(-s.duals[1], 0.5, 1e-12);
  EXPECT_NEAR(-s.duals[2], 0.5, 1e-12);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  LinearProgram inf;
  const auto x = inf.add_variable("x", 1.0);
  inf.add_row({{{x, 1.0}}, RowSense::less_equal, 1.0, "a"});
  inf.add_row({{{x, 1.0}}, RowSense::greater_equal, 2.0, "b"});
  EXPECT_EQ(solve(inf).status, Status::infeasible);

  LinearProgram unb;
  const auto y = unb.add_variable("y", 1.0);
  unb.add_row({{{y, -1.0}}, RowSense::less_equal, 1.0, "a"});
  EXPECT_EQ(solve(unb).status, Status::unbounded);
}

TEST(Simplex, NegativeRightHandSide) {
  // max -x st -x <= -3  ->  x = 3.
  LinearProgram p;
  const auto x = p.add_variable("x", -1.0);
  p.add_row({{{x, -1.0}}, RowSense::less_equal, -3.0, "a"});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::optimal);
  EXPECT_NEAR(s.x[0], 3.0, 1e-12);
  EXPECT_NEAR(s.duals[0], 1.0, 1e-12);
}

TEST(Simplex, RandomProgramsCertifyThemselves) {
  // Random bounded programs: primal value equals the recovered dual value.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram p;
    const int n = 2 + trial % 5, m = 2 + trial % 7;
    for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j), u(rng), j == 0);
    for (int i = 0; i < m; ++i) {
      Row r;
      for (int j = 0; j < n; ++j) r.terms.emplace_back(j, u(rng));
      r.sense = i % 3 == 0 ? RowSense::greater_equal : RowSense::less_equal;
      r.rhs = r.sense == RowSense::greater_equal ? -1.0 - u(rng) * u(rng) : 1.0 + u(rng) * u(rng);
      p.add_row(r);
    }
    Row box;  // keeps everything bounded
    for (int j = 0; j < n; ++j) box.terms.emplace_back(j, 1.0);
    box.rhs = 5.0;
    p.add_row(box);
    Row lower = box;
    lower.sense = RowSense::greater_equal;
    lower.rhs = -5.0;
    p.add_row(lower);
    const auto s = solve(p);
    if (s.status != Status::optimal) continue;
    EXPECT_LT(s.duality_gap, 1e-9) << trial;
    EXPECT_LT(s.infeasibility, 1e-9) << trial;
  }
}

TEST(CanonicalText, ListsRowsAndBounds) {
  LinearProgram p;
  const auto x = p.add_variable("x", 1.0, true);
  p.add_row({{{x, 2.0}}, RowSense::less_equal, 1.0, "cap"});
  const auto text = to_canonical_text(p);
  EXPECT_NE(text.find("maximize"), std::string::npos);
  EXPECT_NE(text.find("cap:"), std::string::npos);
  EXPECT_NE(text.find("x free"), std::string::npos);
}

}  // namespace
}  // namespace pspan::lp
