#include "pspan/returns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pspan/csv_io.hpp"
#include "pspan/errors.hpp"

namespace pspan {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::string_view s = text;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

std::string normalize_month(std::string_view text) {
  std::string_view year, month;
  if (text.size() == 6 && all_digits(text)) {
    year = text.substr(0, 4);
    month = text.substr(4, 2);
  } else if (text.size() == 7 && text[4] == '-' && all_digits(text.substr(0, 4)) &&
             all_digits(text.substr(5, 2))) {
    year = text.substr(0, 4);
    month = text.substr(5, 2);
  } else {
    throw ValidationError("malformed month identifier '" + std::string(text) +
                          "' (expected YYYYMM or YYYY-MM)");
  }
  const int m = (month[0] - '0') * 10 + (month[1] - '0');
  if (m < 1 || m > 12) {
    throw ValidationError("month out of range in '" + std::string(text) + "'");
  }
  return std::string(year) + std::string(month);
}

ReturnPanel::ReturnPanel(std::vector<std::string> dates, std::vector<std::string> assets,
                         RowMatrix values)
    : dates_(std::move(dates)), assets_(std::move(assets)), values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw ValidationError("return panel needs at least one month and one asset");
  }
  if (static_cast<std::size_t>(values_.rows()) != dates_.size() ||
      static_cast<std::size_t>(values_.cols()) != assets_.size()) {
    throw ValidationError("return panel dimensions do not match its labels");
  }
  if (!values_.allFinite()) throw ValidationError("return panel contains non-finite values");
  std::set<std::string_view> seen;
  for (const auto& a : assets_) {
    if (!seen.insert(a).second) throw ValidationError("duplicate asset label '" + a + "'");
  }
  for (std::size_t t = 1; t < dates_.size(); ++t) {
    if (!(dates_[t - 1] < dates_[t])) {
      throw ValidationError("dates must be strictly increasing (" + dates_[t - 1] + " then " +
                            dates_[t] + ")");
    }
  }
}

std::vector<double> ReturnPanel::column(std::size_t i) const {
  std::vector<double> out(periods());
  for (std::size_t t = 0; t < periods(); ++t) out[t] = (*this)(t, i);
  return out;
}

std::optional<std::size_t> ReturnPanel::find_asset(std::string_view label) const {
  const auto it = std::find(assets_.begin(), assets_.end(), label);
  if (it == assets_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - assets_.begin());
}

std::size_t ReturnPanel::asset_index(std::string_view label) const {
  if (auto idx = find_asset(label)) return *idx;
  throw ValidationError("unknown asset '" + std::string(label) + "'");
}

ReturnPanel ReturnPanel::scaled(double factor) const {
  return ReturnPanel(dates_, assets_, values_ * factor);
}

ReturnPanel ReturnPanel::select(std::span<const std::size_t> columns) const {
  RowMatrix out(values_.rows(), static_cast<Eigen::Index>(columns.size()));
  std::vector<std::string> labels;
  labels.reserve(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= n_assets()) throw ValidationError("column index out of range");
    out.col(static_cast<Eigen::Index>(j)) = values_.col(static_cast<Eigen::Index>(columns[j]));
    labels.push_back(assets_[columns[j]]);
  }
  return ReturnPanel(dates_, std::move(labels), std::move(out));
}

bool ReturnPanel::operator==(const ReturnPanel& other) const {
  return dates_ == other.dates_ && assets_ == other.assets_ &&
         values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
         values_ == other.values_;
}

LoadedPanel parse_panel(std::istream& in, double scale, std::string_view source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
    if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
      header = csv::split_line(line);
      break;
    }
  }
  if (header.size() < 2) {
    throw ValidationError(std::string(source) + ": header must hold 'date' and at least one asset");
  }
  std::string first = header[0];
  std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
  if (first != "date") {
    throw ValidationError(std::string(source) + ": first column must be 'date'");
  }
  std::vector<std::string> assets(header.begin() + 1, header.end());
  {
    std::set<std::string_view> seen;
    for (const auto& a : assets) {
      if (a.empty()) throw ValidationError(std::string(source) + ": empty asset label");
      if (!seen.insert(a).second) {
        throw ValidationError(std::string(source) + ": duplicate asset label '" + a + "'");
      }
    }
  }

  std::vector<std::string> dates;
  std::vector<double> cells;
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = csv::split_line(line);
    if (fields.empty() || fields[0].empty()) {
      ++dropped;
      continue;
    }
    std::vector<double> row;
    row.reserve(assets.size());
    bool complete = fields.size() == header.size();
    for (std::size_t j = 1; complete && j < fields.size(); ++j) {
      if (auto v = parse_number(fields[j])) {
        row.push_back(*v * scale);
      } else {
        complete = false;
      }
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    dates.push_back(normalize_month(fields[0]));
    cells.insert(cells.end(), row.begin(), row.end());
  }
  if (dates.size() < 2) {
    throw ValidationError(std::string(source) + ": fewer than two usable rows");
  }
  RowMatrix values = Eigen::Map<const RowMatrix>(cells.data(), static_cast<Eigen::Index>(dates.size()),
                                                 static_cast<Eigen::Index>(assets.size()));
  return {ReturnPanel(std::move(dates), std::move(assets), std::move(values)), dropped};
}

LoadedPanel load_panel(const std::filesystem::path& path, double scale) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_panel(in, scale, path.string());
}

ReturnPanel align(const ReturnPanel& a, const ReturnPanel& b) {
  std::unordered_map<std::string_view, std::size_t> b_rows;
  for (std::size_t t = 0; t < b.periods(); ++t) b_rows.emplace(b.dates()[t], t);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t t = 0; t < a.periods(); ++t) {
    if (auto it = b_rows.find(a.dates()[t]); it != b_rows.end()) pairs.emplace_back(t, it->second);
  }
  if (pairs.empty()) throw ValidationError("panels share no dates");

  std::vector<std::string> assets = a.assets();
  assets.insert(assets.end(), b.assets().begin(), b.assets().end());
  const auto na = static_cast<Eigen::Index>(a.n_assets());
  const auto nb = static_cast<Eigen::Index>(b.n_assets());
  RowMatrix values(static_cast<Eigen::Index>(pairs.size()), na + nb);
  std::vector<std::string> dates;
  dates.reserve(pairs.size());
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    values.row(row).head(na) = a.values().row(static_cast<Eigen::Index>(pairs[r].first));
    values.row(row).tail(nb) = b.values().row(static_cast<Eigen::Index>(pairs[r].second));
    dates.push_back(a.dates()[pairs[r].first]);
  }
  return ReturnPanel(std::move(dates), std::move(assets), std::move(values));
}

ReturnPanel window(const ReturnPanel& panel, std::size_t start, std::size_t length) {
  if (length == 0 || start > panel.periods() || length > panel.periods() - start) {
    throw ValidationError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                          ") outside a panel of " + std::to_string(panel.periods()) + " months");
  }
  std::vector<std::string> dates(panel.dates().begin() + static_cast<std::ptrdiff_t>(start),
                                 panel.dates().begin() + static_cast<std::ptrdiff_t>(start + length));
  RowMatrix values = panel.values().middleRows(static_cast<Eigen::Index>(start),
                                               static_cast<Eigen::Index>(length));
  return ReturnPanel(std::move(dates), panel.assets(), std::move(values));
}

SeriesStats summary_stats(std::span<const double> series) {
  if (series.size() < 2) throw ValidationError("summary statistics need at least two values");
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : series) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  double scale = 0.0;
  for (double x : series) scale = std::max(scale, std::abs(x));
  // Rounding in the mean leaves ~1e-17 residue on constant series.
  const bool constant = m2 <= n * 1e-28 * scale * scale;

  SeriesStats s;
  s.mean = mean;
  s.sd = constant ? 0.0 : std::sqrt(m2 / (n - 1.0));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!constant) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  return s;
}

}  // namespace pspan
