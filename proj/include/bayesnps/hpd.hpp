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

#ifndef BAYESNPS_HPD_HPP
#define BAYESNPS_HPD_HPP

/**
 * \file
 * \brief Monte Carlo posterior sampling of the net promoter score and HPD interval estimation.
 *
 * The HPD interval is approximated with the method of Chen and Shao (1999): among all windows of
 * m + 1 consecutive order statistics of a posterior sample, with m = floor((1 - rho) N), the shortest
 * one estimates the 1 - rho highest posterior density interval of a unimodal posterior.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <bayesnps/errors.hpp>
#include <bayesnps/model.hpp>
#include <bayesnps/parallel.hpp>
#include <bayesnps/rvgen.hpp>

namespace bnps {

/// Sorted Monte Carlo draws of Delta = theta3 - theta1.
class NpsSample {
 public:
  NpsSample() = default;

  /// Takes ownership of the draws and sorts them.
  explicit NpsSample(std::vector<double> draws) : draws_{std::move(draws)} {
    for (double d : draws_) {
      if (!(d >= -1.0 && d <= 1.0)) {
        throw config_error("net promoter score draws must lie in [-1, 1]");
      }
    }
    std::sort(draws_.begin(), draws_.end());
  }

  [[nodiscard]] std::span<const double> draws() const noexcept { return draws_; }
  [[nodiscard]] std::size_t size() const noexcept { return draws_.size(); }
  [[nodiscard]] bool empty() const noexcept { return draws_.empty(); }

  [[nodiscard]] double mean() const {
    return std::accumulate(draws_.begin(), draws_.end(), 0.0) / static_cast<double>(draws_.size());
  }

  /// Unbiased sample variance.
  [[nodiscard]] double variance() const {
    const double mu = mean();
    double ss = 0.0;
    for (double d : draws_) {
      ss += (d - mu) * (d - mu);
    }
    return ss / static_cast<double>(draws_.size() - 1);
  }

 private:
  std::vector<double> draws_;
};

namespace detail {

inline constexpr std::size_t kDeltaBlockSize = 8192;

// Appends `count` draws of theta3 - theta1 under Dir(p), consuming `stream`.
inline void append_delta_draws(RngStream& stream, const DirichletParams& p, std::size_t count,
                               std::vector<double>& out) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto theta = dirichlet_draw(stream, p);
    out.push_back(theta.t3 - theta.t1);
  }
}

// Number of order-statistic steps spanned by an HPD window of coverage 1 - rho.
inline std::size_t window_span(std::size_t n, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw config_error("rho must lie in (0, 1)");
  }
  const auto required = static_cast<std::size_t>(std::ceil(1.0 / rho - 1e-9));
  if (n < required) {
    throw config_error("sample too small for the requested HPD level: need at least ceil(1/rho) draws");
  }
  const auto m = static_cast<std::size_t>(std::floor((1.0 - rho) * static_cast<double>(n) + 1e-9));
  return std::min(m, n - 1);
}

// Shortest [x[j], x[j+m]] over j; equal lengths (to a few ulps) keep the smallest j.
inline std::pair<double, double> shortest_window(std::span<const double> sorted, std::size_t m) {
  const double scale = std::max({1.0, std::abs(sorted.front()), std::abs(sorted.back())});
  const double tie = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::size_t best = 0;
  double best_length = sorted[m] - sorted[0];
  for (std::size_t j = 1; j + m < sorted.size(); ++j) {
    const double length = sorted[j + m] - sorted[j];
    if (length < best_length - tie) {
      best = j;
      best_length = length;
    }
  }
  return {sorted[best], sorted[best + m]};
}

}  // namespace detail

/// Draws `n_draws` values of theta3 - theta1 with theta ~ Dir(p).
///
/// Draws are produced in fixed blocks, block b from `stream.substream(b)`, so the result does not
/// depend on `threads`.
inline NpsSample sample_delta(const RngStream& stream, const DirichletParams& p, std::size_t n_draws,
                              unsigned threads = 1) {
  if (n_draws == 0) {
    throw config_error("number of posterior draws must be positive");
  }
  const std::size_t blocks = (n_draws + detail::kDeltaBlockSize - 1) / detail::kDeltaBlockSize;
  std::vector<double> draws(n_draws);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t begin = b * detail::kDeltaBlockSize;
    const std::size_t count = std::min(detail::kDeltaBlockSize, n_draws - begin);
    std::vector<double> block;
    block.reserve(count);
    auto block_stream = stream.substream(b);
    detail::append_delta_draws(block_stream, p, count, block);
    std::copy(block.begin(), block.end(), draws.begin() + static_cast<std::ptrdiff_t>(begin));
  });
  return NpsSample{std::move(draws)};
}

/// HPD interval of coverage 1 - rho from a sorted sample (Chen-Shao shortest window).
inline CredibleInterval hpd_interval(std::span<const double> sorted, double rho) {
  if (sorted.empty()) {
    throw config_error("cannot compute an HPD interval from an empty sample");
  }
  const std::size_t m = detail::window_span(sorted.size(), rho);
  const auto [lower, upper] = detail::shortest_window(sorted, m);
  CredibleInterval interval;
  interval.lower = lower;
  interval.upper = upper;
  interval.method = IntervalMethod::Hpd;
  interval.level_or_gamma = 1.0 - rho;
  return interval;
}

inline CredibleInterval hpd_interval(const NpsSample& sample, double rho) { return hpd_interval(sample.draws(), rho); }

inline double hpd_length(std::span<const double> sorted, double rho) { return hpd_interval(sorted, rho).length(); }

inline double hpd_length(const NpsSample& sample, double rho) { return hpd_length(sample.draws(), rho); }

/// Equal-tailed counterpart of the HPD window: same m, excluded draws split evenly between tails.
inline CredibleInterval equal_tailed_interval(const NpsSample& sample, double rho) {
  const auto sorted = sample.draws();
  if (sorted.empty()) {
    throw config_error("cannot compute an interval from an empty sample");
  }
  const std::size_t m = detail::window_span(sorted.size(), rho);
  const std::size_t j = (sorted.size() - 1 - m) / 2;
  CredibleInterval interval;
  interval.lower = sorted[j];
  interval.upper = sorted[j + m];
  interval.method = IntervalMethod::Hpd;
  interval.level_or_gamma = 1.0 - rho;
  return interval;
}

}  // namespace bnps

#endif  // BAYESNPS_HPD_HPP
