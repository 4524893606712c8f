#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pspan/inference.hpp"

namespace pspan {

enum class DgpKind { iid_normal, ar1, garch_like };
enum class NullMode { spanning_true, spanning_false };

DgpKind parse_dgp_kind(std::string_view text);
NullMode parse_null_mode(std::string_view text);
std::string_view to_string(DgpKind kind);
std::string_view to_string(NullMode mode);

/// Returns of n base assets (the set K) plus one extra asset that copies
/// base asset `copied`, shifted by `shift` under the alternative.
struct DgpSpec {
  DgpKind kind = DgpKind::iid_normal;
  Eigen::VectorXd means;
  Eigen::MatrixXd covariance;
  double persistence = 0.0;   // AR(1) coefficient of the ar1 kind
  double garch_alpha = 0.1;   // garch_like: weight on last squared shock
  double garch_beta = 0.8;    // garch_like: weight on last variance
  NullMode null_mode = NullMode::spanning_true;
  double shift = 0.01;
  std::size_t copied = 0;

  std::size_t n_base() const noexcept { return static_cast<std::size_t>(means.size()); }
  void validate() const;
};

/// Default desk-scale DGP: two correlated assets, monthly scale.
DgpSpec default_dgp();

/// Panel of T months for replication `rep`; columns A1..An then X.
ReturnPanel simulate_panel(const DgpSpec& dgp, std::size_t periods, std::uint64_t seed, std::uint64_t rep);

struct McConfig {
  std::size_t periods = 200;
  std::size_t reps = 200;
  std::uint64_t seed = 20240101;
  TestOptions test;
  int jobs = 1;

  McConfig() { test.grid = GridParams{6, 3, 6, 3}; }
};

struct RepOutcome {
  double rho = 0.0;
  double q_bc = 0.0;
  bool reject = false;
};

struct McResult {
  std::vector<RepOutcome> reps;
  double rate = 0.0;
};

/// Fraction of replications in which the test rejects spanning. Draws
/// depend only on (seed, rep), so the result ignores the worker count.
McResult simulate_rejection_rate(const DgpSpec& dgp, const McConfig& config);

void write_mc_csv(const McResult& result, std::ostream& out);

}  // namespace pspan
