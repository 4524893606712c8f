#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pspan {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dated panel of simple monthly returns, one row per month and one column
/// per asset. Immutable once constructed; the empirical distribution of its
/// rows is the sample measure every statistic is computed against.
class ReturnPanel {
 public:
  /// Validates: at least one row and one column, finite values, unique
  /// asset labels, and dates (YYYYMM normal form) strictly increasing.
  ReturnPanel(std::vector<std::string> dates, std::vector<std::string> assets, RowMatrix values);

  std::size_t periods() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_assets() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const std::vector<std::string>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& assets() const noexcept { return assets_; }
  const RowMatrix& values() const noexcept { return values_; }

  double operator()(std::size_t t, std::size_t i) const {
    return values_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
  }

  /// Contiguous view of the returns of month `t`.
  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * n_assets(), n_assets()};
  }

  std::vector<double> column(std::size_t i) const;

  /// Index of `label`, or nullopt when absent.
  std::optional<std::size_t> find_asset(std::string_view label) const;
  std::size_t asset_index(std::string_view label) const;  // throws when absent

  /// Same dates and labels, every return multiplied by `factor`.
  ReturnPanel scaled(double factor) const;

  /// Keeps the listed columns, in the given order.
  ReturnPanel select(std::span<const std::size_t> columns) const;

  bool operator==(const ReturnPanel& other) const;

 private:
  std::vector<std::string> dates_;
  std::vector<std::string> assets_;
  RowMatrix values_;
};

struct LoadedPanel {
  ReturnPanel panel;
  std::size_t dropped_rows = 0;
};

/// Reads a CSV panel: header row whose first column is `date`, then one row
/// per month. Rows with an empty or non-numeric cell are dropped and
/// counted. Every return is multiplied by `scale` (use 0.01 for percent
/// files).
LoadedPanel load_panel(const std::filesystem::path& path, double scale = 1.0);
LoadedPanel parse_panel(std::istream& in, double scale = 1.0, std::string_view source = "<stream>");

/// Canonical YYYYMM form of a YYYYMM or YYYY-MM month identifier.
std::string normalize_month(std::string_view text);

/// Horizontal join on the common dates; columns of `a` come first.
ReturnPanel align(const ReturnPanel& a, const ReturnPanel& b);

/// Rows [start, start + length).
ReturnPanel window(const ReturnPanel& panel, std::size_t start, std::size_t length);

struct SeriesStats {
  double mean = 0.0;
  double sd = 0.0;  // denominator n - 1
  std::optional<double> skewness;  // undefined for constant series
  std::optional<double> kurtosis;  // plain (non-excess) standardized fourth moment
};

SeriesStats summary_stats(std::span<const double> series);

}  // namespace pspan
