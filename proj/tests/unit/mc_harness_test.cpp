#include <gtest/gtest.h>

#include <sstream>

#include "pspan/errors.hpp"
#include "pspan/mc_harness.hpp"

namespace pspan {
namespace {

McConfig small_config(std::size_t reps = 4) {
  McConfig c;
  c.periods = 60;
  c.reps = reps;
  c.seed = 7;
  c.test.grid = GridParams{4, 2, 4, 2};
  return c;
}

TEST(Dgp, ParseNames) {
  EXPECT_EQ(parse_dgp_kind("iid-normal"), DgpKind::iid_normal);
  EXPECT_EQ(parse_dgp_kind("ar1"), DgpKind::ar1);
  EXPECT_EQ(parse_dgp_kind("garch-like"), DgpKind::garch_like);
  EXPECT_THROW(parse_dgp_kind("arma"), ValidationError);
  EXPECT_EQ(parse_null_mode("spanning-false"), NullMode::spanning_false);
  EXPECT_THROW(parse_null_mode("maybe"), ValidationError);
}

TEST(Dgp, ValidateRejectsBadCovariance) {
  DgpSpec d = default_dgp();
  d.covariance(0, 1) = 0.1;  // not symmetric
  EXPECT_THROW(d.validate(), ValidationError);
  d = default_dgp();
  d.covariance << 0.001, 0.002, 0.002, 0.001;  // indefinite
  EXPECT_THROW(d.validate(), ValidationError);
  d = default_dgp();
  d.persistence = 1.0;
  EXPECT_THROW(d.validate(), ValidationError);
  d = default_dgp();
  d.kind = DgpKind::garch_like;
  d.garch_alpha = 0.5;
  d.garch_beta = 0.6;
  EXPECT_THROW(d.validate(), ValidationError);
  EXPECT_NO_THROW(default_dgp().validate());
}

TEST(Dgp, PanelShapeAndDeterminism) {
  const DgpSpec d = default_dgp();
  const ReturnPanel a = simulate_panel(d, 50, 11, 3);
  const ReturnPanel b = simulate_panel(d, 50, 11, 3);
  const ReturnPanel c = simulate_panel(d, 50, 11, 4);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  ASSERT_EQ(a.n_assets(), 3u);
  EXPECT_EQ(a.assets().back(), "X");
  for (std::size_t t = 0; t < a.periods(); ++t) EXPECT_EQ(a(t, 2), a(t, d.copied));
}

TEST(Dgp, AlternativeShiftsTheCopy) {
  DgpSpec d = default_dgp();
  d.null_mode = NullMode::spanning_false;
  d.shift = 0.02;
  const ReturnPanel p = simulate_panel(d, 40, 5, 0);
  for (std::size_t t = 0; t < p.periods(); ++t) EXPECT_NEAR(p(t, 2) - p(t, 0), 0.02, 1e-15);
}

TEST(Dgp, SampleMeansMatchInputs) {
  for (auto kind : {DgpKind::iid_normal, DgpKind::ar1, DgpKind::garch_like}) {
    DgpSpec d = default_dgp();
    d.kind = kind;
    d.persistence = 0.3;
    const ReturnPanel p = simulate_panel(d, 40000, 3, 0);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto col = p.column(i);
      double m = 0;
      for (double x : col) m += x;
      m /= static_cast<double>(col.size());
      EXPECT_NEAR(m, d.means(static_cast<Eigen::Index>(i)), 0.0015) << to_string(kind);
    }
  }
}

TEST(RejectionRate, DuplicateNullNeverRejects) {
  const McResult r = simulate_rejection_rate(default_dgp(), small_config());
  EXPECT_EQ(r.rate, 0.0);
  for (const auto& rep : r.reps) EXPECT_EQ(rep.rho, 0.0);
}

TEST(RejectionRate, WorkerCountInvariant) {
  DgpSpec d = default_dgp();
  d.null_mode = NullMode::spanning_false;
  McConfig one = small_config(3);
  McConfig two = one;
  two.jobs = 2;
  const McResult a = simulate_rejection_rate(d, one);
  const McResult b = simulate_rejection_rate(d, two);
  ASSERT_EQ(a.reps.size(), b.reps.size());
  for (std::size_t i = 0; i < a.reps.size(); ++i) {
    EXPECT_EQ(a.reps[i].rho, b.reps[i].rho);
    EXPECT_EQ(a.reps[i].q_bc, b.reps[i].q_bc);
  }
  EXPECT_EQ(a.rate, b.rate);
  std::ostringstream sa, sb;
  write_mc_csv(a, sa);
  write_mc_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(RejectionRate, LargeShiftRejects) {
  DgpSpec d = default_dgp();
  d.null_mode = NullMode::spanning_false;
  d.shift = 0.05;
  const McResult r = simulate_rejection_rate(d, small_config(3));
  for (const auto& rep : r.reps) EXPECT_GT(rep.rho, 0.0);
  EXPECT_EQ(r.rate, 1.0);
}

}  // namespace
}  // namespace pspan
