#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pspan/inference.hpp"

namespace pspan::cli {

/// Every setting of a run. Flags, the --config file and the manifest's
/// "config" block all use the same field names.
struct RunConfig {
  std::string command;

  // inputs
  std::string factors;
  std::vector<std::string> anomaly;
  std::string rf;
  std::string fixture;
  std::vector<std::string> k_assets;  // subset of the factor columns; empty = all
  std::string anomaly_column;         // backtest: which anomaly column to add
  double scale = 1.0;

  // statistic and test
  std::optional<int> n1, n2, p1, p2;  // defaults depend on the command
  std::string mode = "paper";
  double alpha = 0.05;
  std::vector<double> b_exponents{0.6, 0.7, 0.8, 0.9};
  std::size_t min_block = 10;
  bool freeze_knots = false;

  // backtest
  std::size_t window = 300;
  double trc = 0.0035;
  bool first_month_cost = true;

  // simulation
  std::string dgp = "iid-normal";
  std::string null_mode = "spanning-true";
  double shift = 0.01;
  std::size_t periods = 200;
  std::size_t reps = 200;
  std::uint64_t seed = 20240101;
  std::vector<double> means;
  std::vector<double> covariance;  // row-major
  double persistence = 0.0;
  double garch_alpha = 0.1;
  double garch_beta = 0.8;

  // run
  std::string out = "pspan_out";
  int jobs = 1;

  GridParams grid() const;
  TestOptions test_options() const;
  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Reads a config object, or the "config" block of a manifest, over `base`.
/// Only keys present in the file are applied; unknown keys are an error.
void apply_json(const nlohmann::json& j, RunConfig& cfg);

/// Names of the fields `apply_json` understands, in declaration order.
const std::vector<std::string>& config_keys();

/// Copies field `key` from `from` into `to`.
void copy_field(const std::string& key, const RunConfig& from, RunConfig& to);

}  // namespace pspan::cli
