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

#ifndef BAYESNPS_MODEL_HPP
#define BAYESNPS_MODEL_HPP

/**
 * \file
 * \brief Conjugate multinomial/Dirichlet model of detractor, passive and promoter proportions.
 *
 * Counts (x1, x2, x3) of detractors, passives and promoters are multinomial given the proportions
 * theta, and theta carries a Dirichlet prior. The posterior is again Dirichlet, with the counts added
 * to the concentration vector, so the net promoter score Delta = theta3 - theta1 has closed-form
 * posterior mean and variance.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include <bayesnps/errors.hpp>

namespace bnps {

/// Observed detractor / passive / promoter tallies.
struct Counts {
  std::uint64_t x1 = 0;  ///< detractors (scores 0-6)
  std::uint64_t x2 = 0;  ///< passives (scores 7-8)
  std::uint64_t x3 = 0;  ///< promoters (scores 9-10)

  [[nodiscard]] constexpr std::uint64_t n() const noexcept { return x1 + x2 + x3; }

  constexpr Counts& operator+=(const Counts& other) noexcept {
    x1 += other.x1;
    x2 += other.x2;
    x3 += other.x3;
    return *this;
  }

  friend constexpr Counts operator+(Counts lhs, const Counts& rhs) noexcept { return lhs += rhs; }
  friend constexpr bool operator==(const Counts&, const Counts&) = default;
};

/// Positive concentration vector of a three-category Dirichlet distribution.
///
/// The same type serves as prior, posterior and persisted state. Components are real-valued so
/// arbitrary (e.g. Jeffreys-like 0.5) priors are representable.
class DirichletParams {
 public:
  DirichletParams(double a1, double a2, double a3) : alpha_{a1, a2, a3} {
    for (double a : alpha_) {
      if (!(a > 0.0) || !std::isfinite(a)) {
        throw config_error("Dirichlet concentration parameters must be positive and finite");
      }
    }
  }

  explicit DirichletParams(const std::array<double, 3>& alpha) : DirichletParams(alpha[0], alpha[1], alpha[2]) {}

  [[nodiscard]] double a1() const noexcept { return alpha_[0]; }
  [[nodiscard]] double a2() const noexcept { return alpha_[1]; }
  [[nodiscard]] double a3() const noexcept { return alpha_[2]; }
  /// Summed as (a1 + a3) + a2 so that mirrored parameters give bit-identical totals.
  [[nodiscard]] double a0() const noexcept { return (alpha_[0] + alpha_[2]) + alpha_[1]; }
  [[nodiscard]] const std::array<double, 3>& values() const noexcept { return alpha_; }

  /// Same parameters with detractor and promoter concentrations swapped.
  [[nodiscard]] DirichletParams mirrored() const { return {alpha_[2], alpha_[1], alpha_[0]}; }

  friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

 private:
  std::array<double, 3> alpha_;
};

/// Posterior mean and variance of the net promoter score.
struct NpsEstimate {
  double mean = 0.0;
  double variance = 0.0;

  [[nodiscard]] double sd() const { return std::sqrt(variance); }
};

enum class IntervalMethod { Moment, Hpd };

inline std::string to_string(IntervalMethod method) { return method == IntervalMethod::Moment ? "moment" : "hpd"; }

/// Credible interval for the net promoter score.
///
/// `level_or_gamma` holds the multiplier gamma for moment intervals and the coverage 1 - rho for HPD
/// intervals. `clipped` records whether an endpoint was pulled back into [-1, 1].
struct CredibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  IntervalMethod method = IntervalMethod::Moment;
  double level_or_gamma = 0.0;
  bool clipped = false;

  [[nodiscard]] double length() const noexcept { return upper - lower; }
};

/// Conjugate update: adds the observed counts to the concentration vector.
///
/// Successive batches compose, so yesterday's posterior is today's prior.
inline DirichletParams update_posterior(const DirichletParams& prior, const Counts& data) {
  return {prior.a1() + static_cast<double>(data.x1), prior.a2() + static_cast<double>(data.x2),
          prior.a3() + static_cast<double>(data.x3)};
}

/// E[theta3 - theta1] = (a3 - a1) / a0.
inline double posterior_mean(const DirichletParams& p) noexcept { return (p.a3() - p.a1()) / p.a0(); }

/// Var[theta3 - theta1] = (a1 a2 + a2 a3 + 4 a1 a3) / (a0^2 (a0 + 1)).
inline double posterior_variance(const DirichletParams& p) noexcept {
  const double a0 = p.a0();
  const double numerator = p.a2() * (p.a1() + p.a3()) + 4.0 * (p.a1() * p.a3());
  return numerator / (a0 * a0 * (a0 + 1.0));
}

inline NpsEstimate posterior_summary(const DirichletParams& p) noexcept {
  return {posterior_mean(p), posterior_variance(p)};
}

/// Interval mean +/- gamma * sd, clipped to [-1, 1].
inline CredibleInterval moment_interval(const DirichletParams& p, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw config_error("gamma must be a finite non-negative multiplier");
  }
  const auto estimate = posterior_summary(p);
  const double half_width = gamma * estimate.sd();
  const double raw_lower = estimate.mean - half_width;
  const double raw_upper = estimate.mean + half_width;

  CredibleInterval interval;
  interval.lower = std::clamp(raw_lower, -1.0, 1.0);
  interval.upper = std::clamp(raw_upper, -1.0, 1.0);
  interval.method = IntervalMethod::Moment;
  interval.level_or_gamma = gamma;
  interval.clipped = raw_lower < -1.0 || raw_upper > 1.0;
  return interval;
}

}  // namespace bnps

#endif  // BAYESNPS_MODEL_HPP
