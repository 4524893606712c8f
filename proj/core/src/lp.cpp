#include "pspan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pspan/csv_io.hpp"

namespace pspan::lp {

std::size_t LinearProgram::add_variable(std::string name, double cost, bool free) {
  names.push_back(std::move(name));
  objective.push_back(cost);
  is_free.push_back(free);
  return names.size() - 1;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }  // reduced-cost row
  double objective() const { return at(rows_, cols_); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &data_[pr * (cols_ + 1)];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * (cols_ + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

struct Standardized {
  // Column layout: structural (free vars split in two), slack/surplus, artificial.
  std::size_t m = 0, n_struct = 0, n_cols = 0;
  std::vector<std::size_t> pos_col, neg_col;  // per original variable; neg_col = npos if not free
  std::vector<double> cost;                   // per column (phase 2)
  std::vector<bool> artificial;
  std::vector<std::size_t> unit_col;          // per row: column holding +e_i initially
  std::vector<double> flip;                   // +1 or -1 per row
};

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

}  // namespace

Solution solve(const LinearProgram& program, const SolveOptions& options) {
  Solution sol;
  const std::size_t n_vars = program.variables();
  const std::size_t m = program.rows.size();

  Standardized st;
  st.m = m;
  st.pos_col.assign(n_vars, npos);
  st.neg_col.assign(n_vars, npos);
  std::size_t col = 0;
  for (std::size_t j = 0; j < n_vars; ++j) {
    st.pos_col[j] = col++;
    if (program.is_free[j]) st.neg_col[j] = col++;
  }
  st.n_struct = col;

  st.flip.assign(m, 1.0);
  std::vector<RowSense> sense(m);
  for (std::size_t i = 0; i < m; ++i) {
    sense[i] = program.rows[i].sense;
    if (program.rows[i].rhs < 0.0) {
      st.flip[i] = -1.0;
      if (sense[i] == RowSense::less_equal) sense[i] = RowSense::greater_equal;
      else if (sense[i] == RowSense::greater_equal) sense[i] = RowSense::less_equal;
    }
  }
  std::vector<std::size_t> slack_col(m, npos), art_col(m, npos);
  for (std::size_t i = 0; i < m; ++i) {
    if (sense[i] != RowSense::equal) slack_col[i] = col++;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (sense[i] != RowSense::less_equal) art_col[i] = col++;
  }
  st.n_cols = col;
  st.cost.assign(col, 0.0);
  st.artificial.assign(col, false);
  for (std::size_t j = 0; j < n_vars; ++j) {
    st.cost[st.pos_col[j]] = program.objective[j];
    if (st.neg_col[j] != npos) st.cost[st.neg_col[j]] = -program.objective[j];
  }
  st.unit_col.assign(m, npos);

  Tableau tab(m, col);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = program.rows[i];
    for (const auto& [var, coef] : row.terms) {
      tab.at(i, st.pos_col[var]) += st.flip[i] * coef;
      if (st.neg_col[var] != npos) tab.at(i, st.neg_col[var]) -= st.flip[i] * coef;
    }
    tab.rhs(i) = st.flip[i] * row.rhs;
    if (slack_col[i] != npos) tab.at(i, slack_col[i]) = sense[i] == RowSense::less_equal ? 1.0 : -1.0;
    if (art_col[i] != npos) {
      tab.at(i, art_col[i]) = 1.0;
      st.artificial[art_col[i]] = true;
      basis[i] = art_col[i];
      st.unit_col[i] = art_col[i];
    } else {
      basis[i] = slack_col[i];
      st.unit_col[i] = slack_col[i];
    }
  }

  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c <= col; ++c) scale = std::max(scale, std::abs(tab.at(i, c)));
  }
  const double tol = options.optimality_tolerance;
  const double pivot_tol = options.pivot_tolerance;

  auto load_costs = [&](const std::vector<double>& c) {
    for (std::size_t j = 0; j <= col; ++j) tab.cost(j) = 0.0;
    for (std::size_t j = 0; j < col; ++j) tab.cost(j) = -c[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = c[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= col; ++j) tab.cost(j) += cb * tab.at(i, j);
    }
  };

  std::size_t iterations = 0;
  // Returns false when unbounded or out of iterations.
  auto run = [&](bool allow_artificial_entry, bool phase_one, double cost_scale, Status& status) {
    std::vector<bool> banned(col, false);
    std::size_t streak = 0;
    for (;;) {
      if (iterations >= options.max_iterations) {
        status = Status::iteration_limit;
        return false;
      }
      const bool bland = streak >= options.degenerate_streak;
      std::size_t enter = npos;
      double best = -tol * cost_scale;
      for (std::size_t j = 0; j < col; ++j) {
        if ((!allow_artificial_entry && st.artificial[j]) || banned[j]) continue;
        const double d = tab.cost(j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter == npos) return true;

      std::size_t leave = npos;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = tab.at(i, enter);
        if (a <= pivot_tol) continue;
        const double r = std::max(tab.rhs(i), 0.0) / a;
        if (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave != npos && basis[i] < basis[leave])) {
          ratio = r;
          leave = i;
        }
      }
      if (leave == npos) {
        // A ray whose reduced cost is at roundoff level is noise, not a
        // genuine improving direction: set the column aside. Phase 1 is
        // bounded by construction, so every ray there is noise.
        if (phase_one || tab.cost(enter) > -1e-9 * cost_scale) {
          banned[enter] = true;
          continue;
        }
        status = Status::unbounded;
        return false;
      }
      streak = ratio <= 1e-15 ? streak + 1 : 0;
      tab.pivot(leave, enter);
      basis[leave] = enter;
      ++iterations;
    }
  };

  bool has_artificial = std::any_of(art_col.begin(), art_col.end(), [](std::size_t c) { return c != npos; });
  if (has_artificial) {
    std::vector<double> phase1(col, 0.0);
    for (std::size_t j = 0; j < col; ++j) phase1[j] = st.artificial[j] ? -1.0 : 0.0;
    load_costs(phase1);
    Status status = Status::optimal;
    if (!run(true, true, 1.0, status)) {
      sol.status = status;
      sol.iterations = iterations;
      return sol;
    }
    if (tab.objective() < -1e-9 * scale) {
      sol.status = Status::infeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Drive zero-valued artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!st.artificial[basis[i]]) continue;
      std::size_t best_col = npos;
      double best_val = pivot_tol;
      for (std::size_t j = 0; j < col; ++j) {
        if (st.artificial[j]) continue;
        if (std::abs(tab.at(i, j)) > best_val) {
          best_val = std::abs(tab.at(i, j));
          best_col = j;
        }
      }
      if (best_col != npos) {
        tab.pivot(i, best_col);
        basis[i] = best_col;
      }
    }
  }

  load_costs(st.cost);
  double cost_scale = 1.0;
  for (double c : st.cost) cost_scale = std::max(cost_scale, std::abs(c));
  Status status = Status::optimal;
  if (!run(false, false, cost_scale, status)) {
    sol.status = status;
    sol.iterations = iterations;
    return sol;
  }

  // Primal values.
  std::vector<double> colval(col, 0.0);
  for (std::size_t i = 0; i < m; ++i) colval[basis[i]] = tab.rhs(i);
  sol.x.assign(n_vars, 0.0);
  for (std::size_t j = 0; j < n_vars; ++j) {
    sol.x[j] = colval[st.pos_col[j]] - (st.neg_col[j] != npos ? colval[st.neg_col[j]] : 0.0);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n_vars; ++j) sol.objective += program.objective[j] * sol.x[j];

  // Row duals from the reduced costs of the initial unit columns; map back
  // through the sign flips.
  sol.duals.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) sol.duals[i] = st.flip[i] * tab.cost(st.unit_col[i]);

  // Independent certificate against the original data.
  double infeas = 0.0;
  for (std::size_t j = 0; j < n_vars; ++j) {
    if (!program.is_free[j]) infeas = std::max(infeas, -sol.x[j]);
  }
  std::vector<double> aty(n_vars, 0.0);
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = program.rows[i];
    double lhs = 0.0;
    for (const auto& [var, coef] : row.terms) {
      lhs += coef * sol.x[var];
      aty[var] += coef * sol.duals[i];
    }
    switch (row.sense) {
      case RowSense::less_equal:
        infeas = std::max({infeas, lhs - row.rhs, -sol.duals[i]});
        break;
      case RowSense::greater_equal:
        infeas = std::max({infeas, row.rhs - lhs, sol.duals[i]});
        break;
      case RowSense::equal:
        infeas = std::max(infeas, std::abs(lhs - row.rhs));
        break;
    }
    dual_obj += row.rhs * sol.duals[i];
  }
  for (std::size_t j = 0; j < n_vars; ++j) {
    const double reduced = aty[j] - program.objective[j];
    infeas = std::max(infeas, program.is_free[j] ? std::abs(reduced) : -reduced);
  }
  sol.dual_objective = dual_obj;
  sol.duality_gap = std::abs(sol.objective - dual_obj);
  sol.infeasibility = infeas;
  sol.iterations = iterations;
  sol.status = Status::optimal;
  return sol;
}

std::string to_canonical_text(const LinearProgram& program) {
  std::ostringstream out;
  out << "maximize\n ";
  bool first = true;
  for (std::size_t j = 0; j < program.variables(); ++j) {
    if (program.objective[j] == 0.0) continue;
    out << (first ? "" : " + ") << csv::format_exact(program.objective[j]) << ' ' << program.names[j];
    first = false;
  }
  if (first) out << '0';
  out << "\nsubject to\n";
  for (std::size_t i = 0; i < program.rows.size(); ++i) {
    const auto& row = program.rows[i];
    out << ' ' << (row.name.empty() ? "r" + std::to_string(i) : row.name) << ":";
    for (const auto& [var, coef] : row.terms) {
      out << ' ' << (coef < 0 ? "- " : "+ ") << csv::format_exact(std::abs(coef)) << ' ' << program.names[var];
    }
    out << (row.sense == RowSense::less_equal ? " <= " : row.sense == RowSense::greater_equal ? " >= " : " = ")
        << csv::format_exact(row.rhs) << '\n';
  }
  out << "bounds\n";
  for (std::size_t j = 0; j < program.variables(); ++j) {
    out << ' ' << program.names[j] << (program.is_free[j] ? " free" : " >= 0") << '\n';
  }
  out << "end\n";
  return out.str();
}

}  // namespace pspan::lp
