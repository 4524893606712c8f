#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace pspan::lp {

enum class RowSense { less_equal, greater_equal, equal };

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;  // (variable, coefficient)
  RowSense sense = RowSense::less_equal;
  double rhs = 0.0;
  std::string name;
};

/// maximize c'x subject to the rows; variables are nonnegative unless
/// flagged free.
struct LinearProgram {
  std::vector<std::string> names;
  std::vector<double> objective;
  std::vector<bool> is_free;
  std::vector<Row> rows;

  std::size_t add_variable(std::string name, double cost, bool free = false);
  void add_row(Row row) { rows.push_back(std::move(row)); }
  std::size_t variables() const noexcept { return names.size(); }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(Status status);

struct Solution {
  Status status = Status::iteration_limit;
  double objective = 0.0;
  /// b'y for the recovered row duals; equals `objective` at a certified optimum.
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  /// Largest violation of primal rows/bounds or of dual constraints.
  double infeasibility = 0.0;
  std::vector<double> x;
  std::vector<double> duals;  // one per row, sign convention of the original row
  std::size_t iterations = 0;
};

struct SolveOptions {
  double optimality_tolerance = 1e-11;  // reduced costs
  double pivot_tolerance = 1e-9;        // smallest usable pivot element
  std::size_t max_iterations = 200000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
};

/// Two-phase dense tableau simplex. Duals are recovered from the final
/// basis and re-checked against the original data, so the returned gap and
/// infeasibility are an independent optimality certificate.
Solution solve(const LinearProgram& program, const SolveOptions& options = {});

/// Plain-text canonical form (objective, then one line per row) that any
/// LP solver can replay.
std::string to_canonical_text(const LinearProgram& program);

}  // namespace pspan::lp
