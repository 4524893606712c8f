#pragma once

#include <random>
#include <string>
#include <vector>

#include "pspan/returns.hpp"

namespace pspan::test {

inline std::string month(std::size_t k) {
  const std::size_t y = 1990 + k / 12, m = k % 12 + 1;
  return std::to_string(y) + (m < 10 ? "0" : "") + std::to_string(m);
}

/// Panel from rows of returns; assets named A, B, C, ...
inline ReturnPanel make_panel(const std::vector<std::vector<double>>& rows, std::vector<std::string> names = {}) {
  const auto t = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(rows.front().size());
  RowMatrix v(t, n);
  std::vector<std::string> dates;
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) v(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    dates.push_back(month(static_cast<std::size_t>(i)));
  }
  if (names.empty()) {
    for (Eigen::Index j = 0; j < n; ++j) names.push_back(std::string(1, static_cast<char>('A' + j)));
  }
  return ReturnPanel(std::move(dates), std::move(names), std::move(v));
}

inline ReturnPanel random_panel(std::mt19937_64& rng, std::size_t periods, std::size_t assets, double mean = 0.005,
                                double sd = 0.04) {
  std::normal_distribution<double> nd(mean, sd);
  std::vector<std::vector<double>> rows(periods, std::vector<double>(assets));
  for (auto& r : rows) {
    for (auto& x : r) x = nd(rng);
  }
  return make_panel(rows);
}

}  // namespace pspan::test
