#include "pspan/cli/config.hpp"

#include <algorithm>
#include <variant>

#include "pspan/errors.hpp"

namespace pspan::cli {

namespace {

using Member = std::variant<std::string RunConfig::*, std::vector<std::string> RunConfig::*, double RunConfig::*,
                            std::optional<int> RunConfig::*, std::vector<double> RunConfig::*,
                            std::size_t RunConfig::*, bool RunConfig::*, int RunConfig::*>;

struct Field {
  const char* key;
  Member member;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      {"factors", &RunConfig::factors},
      {"anomaly", &RunConfig::anomaly},
      {"rf", &RunConfig::rf},
      {"fixture", &RunConfig::fixture},
      {"k_assets", &RunConfig::k_assets},
      {"anomaly_column", &RunConfig::anomaly_column},
      {"scale", &RunConfig::scale},
      {"n1", &RunConfig::n1},
      {"n2", &RunConfig::n2},
      {"p1", &RunConfig::p1},
      {"p2", &RunConfig::p2},
      {"mode", &RunConfig::mode},
      {"alpha", &RunConfig::alpha},
      {"b_exponents", &RunConfig::b_exponents},
      {"min_block", &RunConfig::min_block},
      {"freeze_knots", &RunConfig::freeze_knots},
      {"window", &RunConfig::window},
      {"trc", &RunConfig::trc},
      {"first_month_cost", &RunConfig::first_month_cost},
      {"dgp", &RunConfig::dgp},
      {"null_mode", &RunConfig::null_mode},
      {"shift", &RunConfig::shift},
      {"periods", &RunConfig::periods},
      {"reps", &RunConfig::reps},
      {"seed", &RunConfig::seed},
      {"means", &RunConfig::means},
      {"covariance", &RunConfig::covariance},
      {"persistence", &RunConfig::persistence},
      {"garch_alpha", &RunConfig::garch_alpha},
      {"garch_beta", &RunConfig::garch_beta},
      {"out", &RunConfig::out},
      {"jobs", &RunConfig::jobs},
  };
  return table;
}

const Field& find_field(const std::string& key) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
  if (it == table.end()) throw ValidationError("unknown config key '" + key + "'");
  return *it;
}

}  // namespace

GridParams RunConfig::grid() const {
  // Simulations default to the desk-scale grid.
  const GridParams base = command == "mc" ? GridParams{6, 3, 6, 3} : GridParams{};
  return GridParams{n1.value_or(base.n1), n2.value_or(base.n2), p1.value_or(base.p1), p2.value_or(base.p2)};
}

TestOptions RunConfig::test_options() const {
  TestOptions t;
  t.alpha = alpha;
  t.b_exponents = b_exponents;
  t.grid = grid();
  t.min_block = min_block;
  t.subsample.freeze_knots = freeze_knots;
  t.subsample.stat.mode = parse_eval_mode(mode);
  t.subsample.stat.jobs = jobs;
  return t;
}

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 0.5)) throw ValidationError("alpha must lie in (0, 0.5)");
  grid().validate();
  parse_eval_mode(mode);
  if (window < 2) throw ValidationError("window must be at least 2");
  if (trc < 0.0) throw ValidationError("trc must be nonnegative");
  if (!(scale > 0.0)) throw ValidationError("scale must be positive");
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
  if (b_exponents.empty()) throw ValidationError("b_exponents must not be empty");
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = cfg.command;
  const GridParams g = cfg.grid();
  for (const auto& f : fields()) {
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, std::optional<int>>) {
            const std::string k = f.key;
            j[f.key] = k == "n1" ? g.n1 : k == "n2" ? g.n2 : k == "p1" ? g.p1 : g.p2;
          } else {
            j[f.key] = cfg.*member;
          }
        },
        f.member);
  }
  return j;
}

void apply_json(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  const nlohmann::json& body = j.contains("config") && j["config"].is_object() ? j["config"] : j;
  for (const auto& [key, value] : body.items()) {
    if (key == "command") continue;
    const Field& f = find_field(key);
    try {
      std::visit(
          [&](auto member) {
            using T = std::remove_cvref_t<decltype(cfg.*member)>;
            if constexpr (std::is_same_v<T, std::optional<int>>) {
              cfg.*member = value.is_null() ? std::optional<int>{} : std::optional<int>{value.get<int>()};
            } else {
              cfg.*member = value.get<T>();
            }
          },
          f.member);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("config key '" + key + "': " + e.what());
    }
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.emplace_back(f.key);
    return k;
  }();
  return keys;
}

void copy_field(const std::string& key, const RunConfig& from, RunConfig& to) {
  std::visit([&](auto member) { to.*member = from.*member; }, find_field(key).member);
}

}  // namespace pspan::cli
