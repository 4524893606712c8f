#include "pspan/mc_harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"
#include "pspan/parallel.hpp"

namespace pspan {

DgpKind parse_dgp_kind(std::string_view text) {
  if (text == "iid-normal") return DgpKind::iid_normal;
  if (text == "ar1") return DgpKind::ar1;
  if (text == "garch-like") return DgpKind::garch_like;
  throw ValidationError("unknown DGP kind '" + std::string(text) + "' (iid-normal, ar1, garch-like)");
}

NullMode parse_null_mode(std::string_view text) {
  if (text == "spanning-true") return NullMode::spanning_true;
  if (text == "spanning-false") return NullMode::spanning_false;
  throw ValidationError("unknown null mode '" + std::string(text) + "' (spanning-true, spanning-false)");
}

std::string_view to_string(DgpKind kind) {
  switch (kind) {
    case DgpKind::iid_normal: return "iid-normal";
    case DgpKind::ar1: return "ar1";
    case DgpKind::garch_like: return "garch-like";
  }
  return "?";
}

std::string_view to_string(NullMode mode) {
  return mode == NullMode::spanning_true ? "spanning-true" : "spanning-false";
}

void DgpSpec::validate() const {
  const auto n = means.size();
  if (n < 1) throw ValidationError("DGP needs at least one base asset");
  if (covariance.rows() != n || covariance.cols() != n) throw ValidationError("covariance shape does not match the means");
  if (!means.allFinite() || !covariance.allFinite()) throw ValidationError("DGP parameters must be finite");
  const double scale = std::max(covariance.cwiseAbs().maxCoeff(), 1e-300);
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw ValidationError("covariance must be positive semidefinite");
  }
  if (!(persistence >= 0.0 && persistence < 1.0)) throw ValidationError("persistence must lie in [0, 1)");
  if (kind == DgpKind::garch_like &&
      !(garch_alpha >= 0.0 && garch_beta >= 0.0 && garch_alpha + garch_beta < 1.0)) {
    throw ValidationError("garch weights must be nonnegative with alpha + beta < 1");
  }
  if (copied >= static_cast<std::size_t>(n)) throw ValidationError("copied asset index out of range");
  if (!std::isfinite(shift)) throw ValidationError("shift must be finite");
}

DgpSpec default_dgp() {
  DgpSpec d;
  d.means = Eigen::Vector2d(0.006, 0.004);
  d.covariance.resize(2, 2);
  d.covariance << 0.0020, 0.0004, 0.0004, 0.0010;
  return d;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string month_label(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu%02zu", 1900 + k / 12, k % 12 + 1);
  return buf;
}

}  // namespace

ReturnPanel simulate_panel(const DgpSpec& dgp, std::size_t periods, std::uint64_t seed, std::uint64_t rep) {
  dgp.validate();
  if (periods < 2) throw ValidationError("simulated panels need at least 2 months");
  const auto n = static_cast<Eigen::Index>(dgp.n_base());

  // Factor the covariance through its eigen decomposition so singular
  // (PSD) matrices work.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dgp.covariance);
  const Eigen::MatrixXd root =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ rep));
  std::normal_distribution<double> normal(0.0, 1.0);

  RowMatrix values(static_cast<Eigen::Index>(periods), n + 1);
  Eigen::VectorXd prev_dev = Eigen::VectorXd::Zero(n);
  double variance_scale = 1.0;
  double prev_shock2 = 1.0;
  std::vector<std::string> dates(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    Eigen::VectorXd dev = root * z;
    switch (dgp.kind) {
      case DgpKind::iid_normal:
        break;
      case DgpKind::ar1:
        // Stationary AR(1) deviations with the given marginal covariance.
        dev = dgp.persistence * prev_dev + std::sqrt(1.0 - dgp.persistence * dgp.persistence) * dev;
        break;
      case DgpKind::garch_like:
        // Common unit-mean variance multiplier driven by past shocks.
        variance_scale = (1.0 - dgp.garch_alpha - dgp.garch_beta) + dgp.garch_alpha * prev_shock2 +
                         dgp.garch_beta * variance_scale;
        dev *= std::sqrt(variance_scale);
        prev_shock2 = z.squaredNorm() / static_cast<double>(n);
        break;
    }
    prev_dev = dev;
    const auto row = static_cast<Eigen::Index>(t);
    for (Eigen::Index i = 0; i < n; ++i) values(row, i) = dgp.means(i) + dev(i);
    const double base = values(row, static_cast<Eigen::Index>(dgp.copied));
    values(row, n) = dgp.null_mode == NullMode::spanning_true ? base : base + dgp.shift;
    dates[t] = month_label(t);
  }
  std::vector<std::string> assets;
  for (Eigen::Index i = 0; i < n; ++i) assets.push_back("A" + std::to_string(i + 1));
  assets.push_back("X");
  return ReturnPanel(std::move(dates), std::move(assets), std::move(values));
}

McResult simulate_rejection_rate(const DgpSpec& dgp, const McConfig& config) {
  dgp.validate();
  if (config.reps < 1) throw ValidationError("need at least one replication");
  McResult result;
  result.reps.resize(config.reps);
  TestOptions test = config.test;
  test.subsample.stat.jobs = 1;
  parallel_for(config.reps, config.jobs, [&](std::size_t r) {
    const ReturnPanel panel = simulate_panel(dgp, config.periods, config.seed, r);
    std::vector<std::size_t> base(dgp.n_base());
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;
    const PortfolioSet K = PortfolioSet::of_indices(panel, base);
    const PortfolioSet L = PortfolioSet::all(panel);
    const TestDecision d = spanning_test(panel, K, L, test);
    result.reps[r] = {d.rho, d.q_bc, d.decision == Decision::reject_spanning};
  });
  std::size_t rejects = 0;
  for (const auto& o : result.reps) rejects += o.reject ? 1 : 0;
  result.rate = static_cast<double>(rejects) / static_cast<double>(config.reps);
  return result;
}

void write_mc_csv(const McResult& result, std::ostream& out) {
  csv::write_row(out, {"rep", "rho", "q_bc", "reject"});
  for (std::size_t r = 0; r < result.reps.size(); ++r) {
    const auto& o = result.reps[r];
    csv::write_row(out, {std::to_string(r), csv::format_exact(o.rho), csv::format_exact(o.q_bc), o.reject ? "1" : "0"});
  }
  csv::write_row(out, {"rate", "", "", csv::format_exact(result.rate)});
}

}  // namespace pspan
