#include "pspan/cli/app.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "pspan/cli/commands.hpp"
#include "pspan/cli/manifest.hpp"
#include "pspan/errors.hpp"

namespace pspan::cli {

namespace {

struct Bound {
  CLI::Option* option;
  std::string key;
};

std::string key_of(const std::string& flag) {
  std::string key = flag.substr(flag.find_first_not_of('-'));
  key = key.substr(0, key.find(','));
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

template <typename T>
void add(CLI::App* sub, std::vector<Bound>& bound, const std::string& flag, T& target, const std::string& help) {
  bound.push_back({sub->add_option(flag, target, help), key_of(flag)});
}

void add_common(CLI::App* sub, RunConfig& cfg, std::vector<Bound>& bound) {
  add(sub, bound, "--out", cfg.out, "Output directory");
  add(sub, bound, "--jobs", cfg.jobs, "Worker threads");
  add(sub, bound, "--mode", cfg.mode, "Utility evaluation: paper or clamped");
  add(sub, bound, "--n1", cfg.n1, "Knots on the loss side");
  add(sub, bound, "--n2", cfg.n2, "Weight levels on the loss side");
  add(sub, bound, "--p1", cfg.p1, "Knots on the gain side");
  add(sub, bound, "--p2", cfg.p2, "Weight levels on the gain side");
}

void add_inputs(CLI::App* sub, RunConfig& cfg, std::vector<Bound>& bound) {
  add(sub, bound, "--factors", cfg.factors, "Benchmark (factor) return CSV");
  add(sub, bound, "--anomaly", cfg.anomaly, "Candidate asset return CSV");
  add(sub, bound, "--k-assets", cfg.k_assets, "Factor columns forming the benchmark set (default: all)");
  add(sub, bound, "--scale", cfg.scale, "Multiply every input return (0.01 for percent files)");
}

void add_test(CLI::App* sub, RunConfig& cfg, std::vector<Bound>& bound) {
  add(sub, bound, "--alpha", cfg.alpha, "Significance level");
  add(sub, bound, "--b-exponents", cfg.b_exponents, "Subsample sizes as exponents of T");
  add(sub, bound, "--min-block", cfg.min_block, "Smallest allowed subsample size");
  bound.push_back({sub->add_flag("--freeze-knots", cfg.freeze_knots, "Reuse full-sample knots in subsamples"),
                   "freeze_knots"});
}

void write_outputs(const RunConfig& cfg, const CommandOutput& output) {
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
  std::vector<std::string> names;
  for (const auto& [name, contents] : output.files) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!(f << contents)) throw IoError("cannot write '" + (dir / name).string() + "'");
    names.push_back(name);
  }
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  if (!(m << make_manifest(cfg, output.inputs, names).dump(2) << '\n')) throw IoError("cannot write manifest.json");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prospect spanning tests: statistic, subsampling inference, backtest and simulation"};
  app.name("pspan");
  app.require_subcommand(1);

  RunConfig parsed;
  std::vector<Bound> bound;
  std::string config_path;

  auto* span = app.add_subcommand("span-test", "Test whether the factors span each anomaly");
  auto* back = app.add_subcommand("backtest", "Rolling out-of-sample comparison and performance report");
  auto* mc = app.add_subcommand("mc", "Rejection rate of the test on simulated data");
  auto* report = app.add_subcommand("report", "Decide stored (statistic, critical value) pairs");
  for (auto* sub : {span, back, mc, report}) sub->add_option("--config", config_path, "JSON config or manifest");

  add_common(span, parsed, bound);
  add_inputs(span, parsed, bound);
  add_test(span, parsed, bound);

  add_common(back, parsed, bound);
  add_inputs(back, parsed, bound);
  add(back, bound, "--anomaly-column", parsed.anomaly_column, "Anomaly column to add");
  add(back, bound, "--rf", parsed.rf, "Risk-free CSV (first column used)");
  add(back, bound, "--window", parsed.window, "Fitting window in months");
  add(back, bound, "--trc", parsed.trc, "Proportional transaction cost");
  bound.push_back({back->add_flag("--first-month-cost,!--no-first-month-cost", parsed.first_month_cost,
                                  "Charge the first month's turnover from an empty book"),
                   "first_month_cost"});

  add_common(mc, parsed, bound);
  add_test(mc, parsed, bound);
  add(mc, bound, "--dgp", parsed.dgp, "iid-normal, ar1 or garch-like");
  add(mc, bound, "--null-mode", parsed.null_mode, "spanning-true or spanning-false");
  add(mc, bound, "--shift", parsed.shift, "Monthly shift of the extra asset under spanning-false");
  add(mc, bound, "--periods", parsed.periods, "Months per replication");
  add(mc, bound, "--reps", parsed.reps, "Replications");
  add(mc, bound, "--seed", parsed.seed, "Base seed");
  add(mc, bound, "--means", parsed.means, "Mean return of each base asset");
  add(mc, bound, "--covariance", parsed.covariance, "Covariance of the base assets, row-major");
  add(mc, bound, "--persistence", parsed.persistence, "AR(1) coefficient");
  add(mc, bound, "--garch-alpha", parsed.garch_alpha, "garch-like shock weight");
  add(mc, bound, "--garch-beta", parsed.garch_beta, "garch-like variance weight");

  add(report, bound, "--fixture", parsed.fixture, "CSV with variable, statistic, q_bc columns");
  add(report, bound, "--out", parsed.out, "Output directory");
  add(report, bound, "--jobs", parsed.jobs, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "pspan: " << e.what() << '\n';
    return validation_error;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  try {
    RunConfig cfg = parsed;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config '" + config_path + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
      cfg = RunConfig{};
      apply_json(j, cfg);
      // Flags given on the command line win over the file.
      for (const auto& b : bound) {
        if (b.option->count() > 0) copy_field(b.key, parsed, cfg);
      }
    }
    cfg.command = chosen->get_name();
    cfg.validate();

    CommandOutput output;
    if (cfg.command == "span-test") output = cmd_span_test(cfg);
    else if (cfg.command == "backtest") output = cmd_backtest(cfg);
    else if (cfg.command == "mc") output = cmd_mc(cfg);
    else output = cmd_report(cfg);

    write_outputs(cfg, output);
    out << output.table;
    return ok;
  } catch (const IoError& e) {
    err << "pspan: " << e.what() << '\n';
    return io_error;
  } catch (const ValidationError& e) {
    err << "pspan: " << e.what() << '\n';
    return validation_error;
  } catch (const SolverError& e) {
    err << "pspan: " << e.what() << "\n--- instance ---\n" << e.dump() << '\n';
    return solver_error;
  } catch (const std::exception& e) {
    err << "pspan: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace pspan::cli
