#include "pspan/eu_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/LU>

#include "pspan/errors.hpp"

namespace pspan {

PortfolioSet PortfolioSet::all(const ReturnPanel& panel) {
  std::vector<std::size_t> idx(panel.n_assets());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return of_indices(panel, std::move(idx));
}

PortfolioSet PortfolioSet::of(const ReturnPanel& panel, std::span<const std::string> labels) {
  std::vector<std::size_t> idx;
  for (const auto& label : labels) idx.push_back(panel.asset_index(label));
  return of_indices(panel, std::move(idx));
}

PortfolioSet PortfolioSet::of_indices(const ReturnPanel& panel, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (indices.empty()) throw ValidationError("a portfolio set needs at least one asset");
  if (indices.back() >= panel.n_assets()) throw ValidationError("portfolio set index out of range");
  return PortfolioSet{panel.assets(), std::move(indices)};
}

bool PortfolioSet::contains(std::size_t index) const {
  return std::binary_search(allowed.begin(), allowed.end(), index);
}

bool PortfolioSet::subset_of(const PortfolioSet& other) const {
  return universe == other.universe &&
         std::includes(other.allowed.begin(), other.allowed.end(), allowed.begin(), allowed.end());
}

std::vector<double> PortfolioSet::vertex(std::size_t k) const {
  std::vector<double> w(universe.size(), 0.0);
  w[allowed.at(k)] = 1.0;
  return w;
}

namespace {

void check_set(const ReturnPanel& panel, const PortfolioSet& set) {
  if (set.universe.size() != panel.n_assets() || set.allowed.empty() ||
      set.allowed.back() >= panel.n_assets()) {
    throw ValidationError("portfolio set does not match the panel");
  }
}

/// The panel restricted to the face's columns, T x d row-major.
RowMatrix face_returns(const ReturnPanel& panel, const PortfolioSet& set) {
  RowMatrix y(static_cast<Eigen::Index>(panel.periods()), static_cast<Eigen::Index>(set.size()));
  for (std::size_t j = 0; j < set.size(); ++j) {
    y.col(static_cast<Eigen::Index>(j)) = panel.values().col(static_cast<Eigen::Index>(set.allowed[j]));
  }
  return y;
}

std::vector<double> expand(const PortfolioSet& set, const Eigen::VectorXd& face_weights) {
  std::vector<double> w(set.universe.size(), 0.0);
  for (std::size_t j = 0; j < set.size(); ++j) w[set.allowed[j]] = face_weights(static_cast<Eigen::Index>(j));
  return w;
}

Eigen::VectorXd restrict_to_face(const PortfolioSet& set, std::span<const double> weights) {
  if (weights.size() != set.universe.size()) throw ValidationError("weight vector has the wrong length");
  Eigen::VectorXd out(static_cast<Eigen::Index>(set.size()));
  double inside = 0.0;
  for (std::size_t j = 0; j < set.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = weights[set.allowed[j]];
    inside += weights[set.allowed[j]];
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - inside) > 1e-12) throw ValidationError("warm start puts weight outside the set");
  return out;
}

double face_expected_utility(const RowMatrix& y, const Eigen::VectorXd& lambda, const PiecewiseUtility& u,
                             EvalMode mode) {
  // Same operation order as expected_utility, so values agree bitwise.
  double sum = 0.0;
  for (Eigen::Index t = 0; t < y.rows(); ++t) {
    double x = 0.0;
    for (Eigen::Index j = 0; j < y.cols(); ++j) x += lambda(j) * y(t, j);
    sum += u.value(x, mode);
  }
  return sum / static_cast<double>(y.rows());
}

EuSolution degenerate_solution(const PortfolioSet& set) {
  return EuSolution{0.0, set.vertex(0), SolveStatus::degenerate};
}

double data_scale(const RowMatrix& y, const PiecewiseUtility& u) {
  double s = y.size() > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
  for (double z : u.grid().knots) s = std::max(s, std::abs(z));
  return s;
}

}  // namespace

double expected_utility(const ReturnPanel& panel, std::span<const double> weights, const PiecewiseUtility& u,
                        EvalMode mode) {
  if (weights.size() != panel.n_assets()) throw ValidationError("weight vector has the wrong length");
  double sum = 0.0;
  for (std::size_t t = 0; t < panel.periods(); ++t) {
    const auto row = panel.row(t);
    double x = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) x += weights[i] * row[i];
    sum += u.value(x, mode);
  }
  return sum / static_cast<double>(panel.periods());
}

lp::LinearProgram assemble_concave_lp(const ReturnPanel& panel, const PortfolioSet& set,
                                      const PiecewiseUtility& u) {
  check_set(panel, set);
  if (u.side() != Side::positive) throw ValidationError("the hypograph LP needs a positive-side utility");
  lp::LinearProgram prog;
  const std::size_t periods = panel.periods();
  const double inv_t = 1.0 / static_cast<double>(periods);
  std::vector<std::size_t> y_var(periods), w_var(set.size());
  for (std::size_t t = 0; t < periods; ++t) y_var[t] = prog.add_variable("y" + std::to_string(t + 1), inv_t, true);
  for (std::size_t j = 0; j < set.size(); ++j) {
    w_var[j] = prog.add_variable("w_" + set.universe[set.allowed[j]], 0.0);
  }
  const auto& pieces = u.pieces();
  for (std::size_t t = 0; t < periods; ++t) {
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      lp::Row row;
      row.name = "cap_t" + std::to_string(t + 1) + "_p" + std::to_string(p + 1);
      row.terms.emplace_back(y_var[t], 1.0);
      for (std::size_t j = 0; j < set.size(); ++j) {
        const double coef = -pieces[p].slope * panel(t, set.allowed[j]);
        if (coef != 0.0) row.terms.emplace_back(w_var[j], coef);
      }
      row.sense = lp::RowSense::less_equal;
      row.rhs = pieces[p].intercept;
      prog.add_row(std::move(row));
    }
  }
  lp::Row budget;
  budget.name = "budget";
  for (std::size_t j = 0; j < set.size(); ++j) budget.terms.emplace_back(w_var[j], 1.0);
  budget.sense = lp::RowSense::equal;
  budget.rhs = 1.0;
  prog.add_row(std::move(budget));
  return prog;
}

EuSolution max_eu_convex(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u) {
  check_set(panel, set);
  if (u.side() != Side::negative) throw ValidationError("vertex search needs a negative-side utility");
  if (u.grid().degenerate()) return degenerate_solution(set);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    const std::size_t col = set.allowed[k];
    double sum = 0.0;
    for (std::size_t t = 0; t < panel.periods(); ++t) sum += u.value(panel(t, col), EvalMode::paper);
    const double value = sum / static_cast<double>(panel.periods());
    if (value > best) {
      best = value;
      best_k = k;
    }
  }
  return EuSolution{best, set.vertex(best_k), SolveStatus::optimal};
}

EuSolution max_eu_concave(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                          const EuOptions& options) {
  check_set(panel, set);
  if (u.side() != Side::positive) throw ValidationError("the hypograph LP needs a positive-side utility");
  if (u.grid().degenerate()) return degenerate_solution(set);

  const RowMatrix y = face_returns(panel, set);
  const auto d = static_cast<Eigen::Index>(set.size());
  const double inv_t = 1.0 / static_cast<double>(y.rows());
  const auto& pieces = u.pieces();

  // Objective value and a supergradient: each month contributes the piece
  // that is lowest at its portfolio return.
  auto evaluate = [&](const Eigen::VectorXd& lambda, Eigen::VectorXd& grad) {
    grad.setZero(d);
    double total = 0.0;
    for (Eigen::Index t = 0; t < y.rows(); ++t) {
      const double x = y.row(t).dot(lambda);
      std::size_t arg = 0;
      double low = pieces[0](x);
      for (std::size_t p = 1; p < pieces.size(); ++p) {
        const double v = pieces[p](x);
        if (v < low) {
          low = v;
          arg = p;
        }
      }
      total += low;
      grad += pieces[arg].slope * y.row(t).transpose();
    }
    grad *= inv_t;
    return total * inv_t;
  };

  struct Cut {
    Eigen::VectorXd slope;
    double offset;  // cut(lambda) = slope'lambda + offset
  };
  std::vector<Cut> cuts;
  Eigen::VectorXd best_lambda;
  double best = -std::numeric_limits<double>::infinity();

  auto add_point = [&](const Eigen::VectorXd& lambda) {
    Eigen::VectorXd grad;
    const double f = evaluate(lambda, grad);
    const double reported = face_expected_utility(y, lambda, u, EvalMode::paper);
    if (reported > best) {
      best = reported;
      best_lambda = lambda;
    }
    const double offset = f - grad.dot(lambda);
    for (const auto& c : cuts) {
      if (c.offset == offset && c.slope == grad) return false;
    }
    cuts.push_back({grad, offset});
    return true;
  };

  for (Eigen::Index k = 0; k < d; ++k) add_point(Eigen::VectorXd::Unit(d, k));
  if (options.warm_start) add_point(restrict_to_face(set, *options.warm_start));
  if (d == 1) return EuSolution{best, expand(set, best_lambda), SolveStatus::optimal};

  // The master is solved in units of the data so its entries are O(1).
  const double scale = std::max(data_scale(y, u), std::numeric_limits<double>::min());
  const double tol = 1e-13 * scale;
  double upper = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    // Master problem in dual form: min over cut mixtures mu of
    // sum mu_i offset_i + max_j sum mu_i slope_ij. Its row duals are the
    // portfolio weights.
    lp::LinearProgram master;
    std::vector<std::size_t> mu(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      mu[i] = master.add_variable("mu" + std::to_string(i), -cuts[i].offset / scale);
    }
    const std::size_t theta = master.add_variable("theta", -1.0, true);
    lp::Row simplex_row;
    for (std::size_t i = 0; i < cuts.size(); ++i) simplex_row.terms.emplace_back(mu[i], 1.0);
    simplex_row.sense = lp::RowSense::equal;
    simplex_row.rhs = 1.0;
    master.add_row(std::move(simplex_row));
    for (Eigen::Index j = 0; j < d; ++j) {
      lp::Row row;
      row.terms.emplace_back(theta, 1.0);
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (cuts[i].slope(j) != 0.0) row.terms.emplace_back(mu[i], -cuts[i].slope(j) / scale);
      }
      row.sense = lp::RowSense::greater_equal;
      row.rhs = 0.0;
      master.add_row(std::move(row));
    }
    const lp::Solution ms = lp::solve(master);
    if (ms.status != lp::Status::optimal) {
      throw SolverError("cutting-plane master problem ended " + lp::to_string(ms.status),
                        lp::to_canonical_text(assemble_concave_lp(panel, set, u)));
    }
    upper = -ms.objective * scale;
    Eigen::VectorXd lambda(d);
    for (Eigen::Index j = 0; j < d; ++j) lambda(j) = std::max(0.0, -ms.duals[static_cast<std::size_t>(j) + 1]);
    const double mass = lambda.sum();
    if (!(mass > 0.0)) {
      throw SolverError("cutting-plane master returned no portfolio",
                        lp::to_canonical_text(assemble_concave_lp(panel, set, u)));
    }
    lambda /= mass;

    if (upper - best <= tol) break;
    if (!add_point(lambda)) break;  // the model is exact at its own maximizer
  }

  const double gap = std::max(0.0, upper - best);
  if (gap > options.acceptance_gap) {
    throw SolverError("hypograph LP not certified: gap " + std::to_string(gap),
                      lp::to_canonical_text(assemble_concave_lp(panel, set, u)));
  }
  return EuSolution{best, expand(set, best_lambda), SolveStatus::optimal};
}

EuSolution max_eu_clamped(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                          const EuOptions& options) {
  check_set(panel, set);
  if (u.grid().degenerate()) return degenerate_solution(set);
  const RowMatrix y = face_returns(panel, set);
  const auto d = static_cast<Eigen::Index>(set.size());
  const auto breaks = u.breakpoints(EvalMode::clamped);

  Eigen::VectorXd best_lambda = Eigen::VectorXd::Unit(d, 0);
  double best = face_expected_utility(y, best_lambda, u, EvalMode::clamped);
  for (Eigen::Index k = 1; k < d; ++k) {
    const Eigen::VectorXd v = Eigen::VectorXd::Unit(d, k);
    const double f = face_expected_utility(y, v, u, EvalMode::clamped);
    if (f > best) {
      best = f;
      best_lambda = v;
    }
  }
  if (d == 1) return EuSolution{best, expand(set, best_lambda), SolveStatus::optimal};

  // Candidate constraints: facets w_j = 0, then hyperplanes w'Y_t = breakpoint.
  struct Plane {
    Eigen::RowVectorXd normal;
    double level;
  };
  std::vector<Plane> planes;
  for (Eigen::Index j = 0; j < d; ++j) planes.push_back({Eigen::RowVectorXd::Unit(d, j), 0.0});
  for (Eigen::Index t = 0; t < y.rows(); ++t) {
    for (double b : breaks) planes.push_back({y.row(t), b});
  }

  const std::size_t choose = static_cast<std::size_t>(d) - 1;
  {
    long double count = 1.0L;
    for (std::size_t i = 0; i < choose; ++i) count = count * (planes.size() - i) / (i + 1);
    if (count > static_cast<long double>(options.clamped_vertex_cap)) {
      throw ValidationError("clamped-mode search would visit " + std::to_string(static_cast<double>(count)) +
                            " arrangement vertices; reduce the assets, months or grid");
    }
  }

  Eigen::MatrixXd system(d, d);
  Eigen::VectorXd rhs(d);
  system.row(d - 1).setOnes();
  rhs(d - 1) = 1.0;
  std::vector<std::size_t> pick(choose);
  for (std::size_t i = 0; i < choose; ++i) pick[i] = i;
  const double feas_tol = 1e-12;
  for (;;) {
    for (std::size_t r = 0; r < choose; ++r) {
      system.row(static_cast<Eigen::Index>(r)) = planes[pick[r]].normal;
      rhs(static_cast<Eigen::Index>(r)) = planes[pick[r]].level;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (lu.rank() == d) {
      Eigen::VectorXd lambda = lu.solve(rhs);
      if (lambda.minCoeff() >= -feas_tol) {
        lambda = lambda.cwiseMax(0.0);
        lambda /= lambda.sum();
        const double f = face_expected_utility(y, lambda, u, EvalMode::clamped);
        if (f > best) {
          best = f;
          best_lambda = lambda;
        }
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = choose;
    while (i > 0 && pick[i - 1] == planes.size() - choose + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < choose; ++k) pick[k] = pick[k - 1] + 1;
  }
  return EuSolution{best, expand(set, best_lambda), SolveStatus::optimal};
}

EuSolution max_expected_utility(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u,
                                EvalMode mode, const EuOptions& options) {
  if (mode == EvalMode::clamped) return max_eu_clamped(panel, set, u, options);
  return u.side() == Side::negative ? max_eu_convex(panel, set, u) : max_eu_concave(panel, set, u, options);
}

std::vector<std::vector<double>> simplex_grid(const PortfolioSet& set, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("grid step must lie in (0, 1]");
  const double inv = 1.0 / step;
  const auto rounded = std::llround(inv);
  const long long parts = std::abs(inv - static_cast<double>(rounded)) < 1e-9
                              ? rounded
                              : static_cast<long long>(std::ceil(inv));
  std::vector<std::vector<double>> points;
  std::vector<long long> counts(set.size(), 0);
  auto fill = [&](auto&& self, std::size_t pos, long long remaining) -> void {
    if (pos + 1 == counts.size()) {
      counts[pos] = remaining;
      std::vector<double> w(set.universe.size(), 0.0);
      for (std::size_t j = 0; j < counts.size(); ++j) {
        w[set.allowed[j]] = static_cast<double>(counts[j]) / static_cast<double>(parts);
      }
      points.push_back(std::move(w));
      return;
    }
    for (long long v = 0; v <= remaining; ++v) {
      counts[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  fill(fill, 0, parts);
  return points;
}

double grid_oracle(const ReturnPanel& panel, const PortfolioSet& set, const PiecewiseUtility& u, double step,
                   EvalMode mode) {
  check_set(panel, set);
  if (set.size() > 4) throw ValidationError("the grid oracle handles at most 4 assets");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& w : simplex_grid(set, step)) best = std::max(best, expected_utility(panel, w, u, mode));
  return best;
}

}  // namespace pspan
