#include "pspan/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "pspan/backtest.hpp"
#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"
#include "pspan/mc_harness.hpp"
#include "pspan/perf_metrics.hpp"

namespace pspan::cli {

namespace {

using csv::format_exact;
using csv::format_significant;

std::string opt_text(const std::optional<double>& v) { return v ? format_significant(*v) : "undefined"; }

/// Fixed-width text table for stdout.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << (c ? "  " : "") << std::left << std::setw(static_cast<int>(width[c])) << r[c];
    }
    out << '\n';
  }
  return out.str();
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

ReturnPanel load_input(const std::string& path, const RunConfig& cfg, CommandOutput& output) {
  if (path.empty()) throw ValidationError("missing input path");
  LoadedPanel loaded = load_panel(path, cfg.scale);
  output.inputs.push_back(path);
  return std::move(loaded.panel);
}

std::vector<std::size_t> factor_columns(const ReturnPanel& factors, const RunConfig& cfg) {
  std::vector<std::size_t> cols;
  if (cfg.k_assets.empty()) {
    for (std::size_t i = 0; i < factors.n_assets(); ++i) cols.push_back(i);
  } else {
    for (const auto& label : cfg.k_assets) cols.push_back(factors.asset_index(label));
  }
  return cols;
}

std::vector<std::size_t> first_n(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

nlohmann::ordered_json result_json(const SpanningResult& r, const std::vector<std::string>& assets) {
  nlohmann::ordered_json j;
  j["rho"] = r.rho;
  j["side"] = std::string(to_string(r.side));
  j["utility_index"] = r.utility_index;
  j["assets"] = assets;
  j["lambda_star"] = r.lambda_star;
  j["kappa_star"] = r.kappa_star;
  j["per_utility"] = r.per_utility;
  return j;
}

}  // namespace

CommandOutput cmd_span_test(const RunConfig& cfg) {
  CommandOutput output;
  if (cfg.anomaly.empty()) throw ValidationError("span-test needs at least one --anomaly file");
  const ReturnPanel factors = load_input(cfg.factors, cfg, output);
  std::vector<ReturnPanel> anomalies;
  for (const auto& path : cfg.anomaly) anomalies.push_back(load_input(path, cfg, output));

  const auto kcols = factor_columns(factors, cfg);
  const ReturnPanel base = factors.select(kcols);
  const TestOptions options = cfg.test_options();

  std::vector<std::vector<std::string>> table{{"variable", "statistic", "q_bc", "result"}};
  std::vector<std::vector<std::string>> rows{
      {"variable", "statistic", "q_bc", "result", "gamma0", "gamma1", "side", "utility_index", "months"}};
  std::vector<std::vector<std::string>> quantile_rows{{"variable", "b", "blocks", "quantile"}};
  nlohmann::ordered_json results = nlohmann::ordered_json::object();

  for (const auto& anomaly : anomalies) {
    for (std::size_t j = 0; j < anomaly.n_assets(); ++j) {
      const std::vector<std::size_t> one{j};
      const ReturnPanel panel = align(base, anomaly.select(one));
      const PortfolioSet K = PortfolioSet::of_indices(panel, first_n(kcols.size()));
      const PortfolioSet L = PortfolioSet::all(panel);
      const TestDecision d = spanning_test(panel, K, L, options);
      const std::string& name = anomaly.assets()[j];
      table.push_back({name, format_significant(d.rho), format_significant(d.q_bc), to_string(d.decision)});
      rows.push_back({name, format_exact(d.rho), format_exact(d.q_bc), to_string(d.decision), format_exact(d.gamma0),
                      format_exact(d.gamma1), std::string(to_string(d.statistic.side)),
                      std::to_string(d.statistic.utility_index), std::to_string(panel.periods())});
      for (const auto& dist : d.distributions) {
        quantile_rows.push_back({name, std::to_string(dist.b), std::to_string(dist.values.size()),
                                 format_exact(d.quantiles_per_b.at(dist.b))});
      }
      results[name] = result_json(d.statistic, panel.assets());
    }
  }
  output.files.emplace_back("span_test.csv", csv_text(rows));
  output.files.emplace_back("subsample_quantiles.csv", csv_text(quantile_rows));
  output.files.emplace_back("span_results.json", results.dump(2) + "\n");
  output.table = render_table(table);
  return output;
}

CommandOutput cmd_backtest(const RunConfig& cfg) {
  CommandOutput output;
  const ReturnPanel factors = load_input(cfg.factors, cfg, output);
  const auto kcols = factor_columns(factors, cfg);
  ReturnPanel panel = factors.select(kcols);
  if (cfg.anomaly.size() > 1) throw ValidationError("backtest takes one --anomaly file");
  if (!cfg.anomaly.empty()) {
    const ReturnPanel anomaly = load_input(cfg.anomaly.front(), cfg, output);
    std::size_t col = 0;
    if (!cfg.anomaly_column.empty()) {
      col = anomaly.asset_index(cfg.anomaly_column);
    } else if (anomaly.n_assets() != 1) {
      throw ValidationError("anomaly file has several columns; pick one with --anomaly-column");
    }
    const std::vector<std::size_t> one{col};
    panel = align(panel, anomaly.select(one));
  }
  std::vector<double> rf;
  std::optional<ReturnPanel> rf_panel;
  if (!cfg.rf.empty()) rf_panel = load_input(cfg.rf, cfg, output);

  BacktestOptions options;
  options.window = cfg.window;
  options.grid = cfg.grid();
  options.stat.mode = parse_eval_mode(cfg.mode);
  options.stat.jobs = cfg.jobs;
  const PortfolioSet K = PortfolioSet::of_indices(panel, first_n(kcols.size()));
  const PortfolioSet L = PortfolioSet::all(panel);
  const BacktestTrack track = run_backtest(panel, K, L, options);

  if (rf_panel) {
    std::map<std::string, double> by_date;
    for (std::size_t t = 0; t < rf_panel->periods(); ++t) by_date[rf_panel->dates()[t]] = (*rf_panel)(t, 0);
    for (const auto& d : track.dates) {
      const auto it = by_date.find(d);
      if (it == by_date.end()) throw ValidationError("risk-free series has no value for " + d);
      rf.push_back(it->second);
    }
  }
  PerfOptions perf;
  perf.trc = cfg.trc;
  perf.charge_first = cfg.first_month_cost;
  const PerfReport report = perf_report(track, rf, perf);

  std::ostringstream track_csv, perf_csv, weights_csv;
  write_track_csv(track, track_csv);
  write_perf_csv(report, perf_csv);
  write_weight_stats_csv(weight_stats(track), weights_csv);
  output.files.emplace_back("backtest_track.csv", track_csv.str());
  output.files.emplace_back("perf_report.csv", perf_csv.str());
  output.files.emplace_back("weight_stats.csv", weights_csv.str());

  std::vector<std::vector<std::string>> table{
      {"measure", "factor", "aug"},
      {"Mean", format_significant(report.factor.mean), format_significant(report.aug.mean)},
      {"SD", format_significant(report.factor.sd), format_significant(report.aug.sd)},
      {"Sharpe", opt_text(report.factor.sharpe), opt_text(report.aug.sharpe)},
      {"D.Sharpe", opt_text(report.factor.downside_sharpe), opt_text(report.aug.downside_sharpe)},
      {"UP", opt_text(report.factor.up_ratio), opt_text(report.aug.up_ratio)},
      {"Return Loss", "", opt_text(report.return_loss)},
  };
  for (const auto& [a, theta] : report.opportunity_cost) {
    table.push_back({"Opportunity cost a=" + format_significant(a), "", format_significant(theta)});
  }
  output.table = "OOS months: " + std::to_string(track.size()) + "\n" + render_table(table);
  return output;
}

CommandOutput cmd_mc(const RunConfig& cfg) {
  CommandOutput output;
  DgpSpec dgp = default_dgp();
  dgp.kind = parse_dgp_kind(cfg.dgp);
  dgp.null_mode = parse_null_mode(cfg.null_mode);
  dgp.shift = cfg.shift;
  dgp.persistence = cfg.persistence;
  dgp.garch_alpha = cfg.garch_alpha;
  dgp.garch_beta = cfg.garch_beta;
  if (!cfg.means.empty()) {
    const auto n = static_cast<Eigen::Index>(cfg.means.size());
    if (cfg.covariance.size() != cfg.means.size() * cfg.means.size()) {
      throw ValidationError("covariance needs n*n entries for n means");
    }
    dgp.means = Eigen::Map<const Eigen::VectorXd>(cfg.means.data(), n);
    dgp.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cfg.covariance.data(), n, n);
  } else if (!cfg.covariance.empty()) {
    throw ValidationError("covariance given without means");
  }
  dgp.validate();

  McConfig mc;
  mc.periods = cfg.periods;
  mc.reps = cfg.reps;
  mc.seed = cfg.seed;
  mc.test = cfg.test_options();
  mc.jobs = cfg.jobs;
  const McResult result = simulate_rejection_rate(dgp, mc);

  std::vector<std::vector<std::string>> reps{{"rep", "rho", "q_bc", "reject"}};
  for (std::size_t r = 0; r < result.reps.size(); ++r) {
    const auto& o = result.reps[r];
    reps.push_back({std::to_string(r), format_exact(o.rho), format_exact(o.q_bc), o.reject ? "1" : "0"});
  }
  std::vector<std::vector<std::string>> summary{
      {"dgp", "null_mode", "shift", "periods", "reps", "alpha", "rate"},
      {cfg.dgp, cfg.null_mode, format_exact(cfg.shift), std::to_string(cfg.periods), std::to_string(cfg.reps),
       format_exact(cfg.alpha), format_exact(result.rate)}};
  output.files.emplace_back("mc_reps.csv", csv_text(reps));
  output.files.emplace_back("mc_summary.csv", csv_text(summary));
  output.table = render_table({{"dgp", "null_mode", "periods", "reps", "alpha", "rejection_rate"},
                               {cfg.dgp, cfg.null_mode, std::to_string(cfg.periods), std::to_string(cfg.reps),
                                format_significant(cfg.alpha), format_significant(result.rate)}});
  return output;
}

CommandOutput cmd_report(const RunConfig& cfg) {
  CommandOutput output;
  if (cfg.fixture.empty()) throw ValidationError("report needs --fixture");
  std::ifstream in(cfg.fixture);
  if (!in) throw IoError("cannot open '" + cfg.fixture + "'");
  output.inputs.push_back(cfg.fixture);

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("fixture is empty");
  const auto header = csv::split_line(line);
  auto column = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names) {
      const auto it = std::find(header.begin(), header.end(), n);
      if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
    }
    return std::nullopt;
  };
  const auto c_var = column({"variable"});
  const auto c_stat = column({"statistic", "rho"});
  const auto c_crit = column({"q_bc", "critical_value"});
  const auto c_table = column({"table"});
  const auto c_pub = column({"published"});
  if (!c_var || !c_stat || !c_crit) throw ValidationError("fixture needs variable, statistic and q_bc columns");

  auto number = [&](const std::string& text, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ValidationError("fixture line " + std::to_string(line_no) + ": '" + text + "' is not a number");
    }
    return v;
  };

  std::vector<std::string> head;
  if (c_table) head.push_back("table");
  head.insert(head.end(), {"variable", "statistic", "q_bc", "result"});
  if (c_pub) head.insert(head.end(), {"published", "match"});
  std::vector<std::vector<std::string>> rows{head}, table{head};
  std::size_t line_no = 1, matches = 0, published = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != header.size()) throw ValidationError("fixture line " + std::to_string(line_no) + " has the wrong field count");
    const double rho = number(f[*c_stat], line_no);
    const double q = number(f[*c_crit], line_no);
    const std::string result = to_string(decide(rho, q));
    std::vector<std::string> row, shown;
    if (c_table) {
      row.push_back(f[*c_table]);
      shown.push_back(f[*c_table]);
    }
    row.insert(row.end(), {f[*c_var], format_exact(rho), format_exact(q), result});
    shown.insert(shown.end(), {f[*c_var], format_significant(rho), format_significant(q), result});
    if (c_pub) {
      const bool match = f[*c_pub] == result;
      matches += match ? 1 : 0;
      ++published;
      row.insert(row.end(), {f[*c_pub], match ? "yes" : "no"});
      shown.insert(shown.end(), {f[*c_pub], match ? "yes" : "no"});
    }
    rows.push_back(std::move(row));
    table.push_back(std::move(shown));
  }
  output.files.emplace_back("span_test.csv", csv_text(rows));
  output.table = render_table(table);
  if (c_pub) {
    output.table += std::to_string(matches) + " of " + std::to_string(published) + " decisions match\n";
  }
  return output;
}

}  // namespace pspan::cli
