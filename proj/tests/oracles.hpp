// Copyright 2026 The bayesnps Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BAYESNPS_TESTS_ORACLES_HPP
#define BAYESNPS_TESTS_ORACLES_HPP

// Test-only reference computations. Nothing here calls into the library's sampling or HPD code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace bnps::testing {

using Outcome = std::array<std::uint64_t, 3>;

/// All (x1, x2, x3) with x1 + x2 + x3 = n.
inline std::vector<Outcome> enumerate_outcomes(std::uint64_t n) {
  std::vector<Outcome> outcomes;
  for (std::uint64_t x1 = 0; x1 <= n; ++x1) {
    for (std::uint64_t x2 = 0; x1 + x2 <= n; ++x2) {
      outcomes.push_back({x1, x2, n - x1 - x2});
    }
  }
  return outcomes;
}

inline double log_factorial(std::uint64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// n! / (x1! x2! x3!) * t1^x1 t2^x2 t3^x3
inline double multinomial_pmf(const Outcome& x, const std::array<double, 3>& theta) {
  const std::uint64_t n = x[0] + x[1] + x[2];
  double log_p = log_factorial(n);
  for (std::size_t i = 0; i < 3; ++i) {
    log_p -= log_factorial(x[i]);
    if (x[i] > 0) {
      log_p += static_cast<double>(x[i]) * std::log(theta[i]);
    }
  }
  return std::exp(log_p);
}

/// Dirichlet-multinomial pmf: n!/prod x_i! * Gamma(a0)/Gamma(n + a0) * prod Gamma(x_i + a_i)/Gamma(a_i).
inline double dirichlet_multinomial_pmf(const Outcome& x, const std::array<double, 3>& alpha) {
  const std::uint64_t n = x[0] + x[1] + x[2];
  const double a0 = alpha[0] + alpha[1] + alpha[2];
  double log_p = log_factorial(n) + std::lgamma(a0) - std::lgamma(static_cast<double>(n) + a0);
  for (std::size_t i = 0; i < 3; ++i) {
    log_p += std::lgamma(static_cast<double>(x[i]) + alpha[i]) - std::lgamma(alpha[i]) - log_factorial(x[i]);
  }
  return std::exp(log_p);
}

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int degrees_of_freedom = 0;
};

/// Pearson goodness of fit of observed outcome counts against exact probabilities.
inline ChiSquareResult chi_square_gof(const std::map<Outcome, std::uint64_t>& observed,
                                      const std::vector<std::pair<Outcome, double>>& expected_probs,
                                      std::uint64_t replicates) {
  ChiSquareResult result;
  for (const auto& [outcome, prob] : expected_probs) {
    const double expected = prob * static_cast<double>(replicates);
    const auto it = observed.find(outcome);
    const double seen = it == observed.end() ? 0.0 : static_cast<double>(it->second);
    result.statistic += (seen - expected) * (seen - expected) / expected;
  }
  result.degrees_of_freedom = static_cast<int>(expected_probs.size()) - 1;
  const boost::math::chi_squared dist(result.degrees_of_freedom);
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

/// Every window [x[j], x[j + m]] scanned explicitly; returns the shortest, lowest j on exact ties.
inline std::pair<double, double> brute_force_hpd(std::vector<double> draws, double rho) {
  std::sort(draws.begin(), draws.end());
  const std::size_t n = draws.size();
  std::size_t m = static_cast<std::size_t>(std::floor((1.0 - rho) * static_cast<double>(n) + 1e-9));
  m = std::min(m, n - 1);
  std::pair<double, double> best{draws[0], draws[m]};
  double best_length = std::numeric_limits<double>::infinity();
  for (std::size_t lo = 0; lo < n; ++lo) {
    for (std::size_t hi = lo; hi < n; ++hi) {
      if (hi - lo != m) {
        continue;
      }
      const double length = draws[hi] - draws[lo];
      if (length < best_length) {
        best_length = length;
        best = {draws[lo], draws[hi]};
      }
    }
  }
  return best;
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic KS critical value at the 1% level: 1.628 / sqrt(n).
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace bnps::testing

#endif  // BAYESNPS_TESTS_ORACLES_HPP
