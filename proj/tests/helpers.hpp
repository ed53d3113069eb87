#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sigdrift/core.hpp"

namespace testing_helpers {

inline sigdrift::Signature make_signature(std::vector<std::vector<double>> raw_rows,
                                          std::string provider = "p") {
  std::vector<sigdrift::QoSSeries> rows;
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    rows.push_back({"q" + std::to_string(i), std::move(raw_rows[i]), ""});
  }
  const std::size_t n = rows.front().values.size();
  return sigdrift::Signature::from_raw_rows(std::move(provider), sigdrift::TimeGrid(n),
                                            std::move(rows));
}

// Smooth seasonal-looking row with a positive mean level.
inline std::vector<double> seasonal_row(std::size_t n, std::uint64_t seed, double level = 10.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.2);
  std::uniform_real_distribution<double> phase(0.0, 6.28);
  const double ph = phase(rng);
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) {
    v[t] = level + std::sin(2 * M_PI * t / 120.0 + ph) + 0.5 * std::cos(2 * M_PI * t / 45.0) + g(rng);
  }
  return v;
}

inline sigdrift::Signature seasonal_signature(std::size_t n, std::uint64_t seed,
                                              std::string provider = "p") {
  return make_signature({seasonal_row(n, seed)}, std::move(provider));
}

}  // namespace testing_helpers
