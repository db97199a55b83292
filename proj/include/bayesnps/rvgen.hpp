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

#ifndef BAYESNPS_RVGEN_HPP
#define BAYESNPS_RVGEN_HPP

/**
 * \file
 * \brief Seedable, stream-indexed random variate generation.
 *
 * The uniform source is Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
 * The 64-bit seed is the Philox key; the 128-bit counter is split into a 64-bit stream id (upper
 * words) and a 64-bit block index (lower words). Any (seed, stream_id) pair is therefore an
 * independent substream that costs nothing to create, which is what lets Monte Carlo loops hand
 * each replication its own stream and stay bit-reproducible under any thread count.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <bayesnps/errors.hpp>
#include <bayesnps/model.hpp>

namespace bnps {

/// Philox4x32 with 10 rounds: maps (counter, key) to four pseudo-random 32-bit words.
struct Philox4x32 {
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static constexpr counter_type generate(counter_type ctr, key_type key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9U;
        key[1] += 0xBB67AE85U;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// SplitMix64 finalizer, used to derive substream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// A seeded substream of 64-bit uniform words. Satisfies UniformRandomBitGenerator.
///
/// Value type: copying a stream copies its position, so a copy replays the same sequence. Streams
/// must not be shared between threads; derive a child with `substream` instead.
class RngStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kDefaultSeed = 20210701;

  explicit constexpr RngStream(std::uint64_t seed = kDefaultSeed, std::uint64_t stream_id = 0) noexcept
      : seed_{seed}, stream_id_{stream_id} {}

  [[nodiscard]] constexpr std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream for a given index. Deterministic in (seed, stream_id, index); does not advance *this.
  [[nodiscard]] constexpr RngStream substream(std::uint64_t index) const noexcept {
    return RngStream{seed_, mix64(stream_id_ ^ mix64(index))};
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    if (buffered_ == 0) {
      refill();
    }
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double on the open interval (0, 1).
  double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  constexpr void refill() noexcept {
    const Philox4x32::counter_type ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                       static_cast<std::uint32_t>(stream_id_),
                                       static_cast<std::uint32_t>(stream_id_ >> 32)};
    const Philox4x32::key_type key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    ++block_;
    // Consumed back to front by operator().
    buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
    buffered_ = 2;
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

/// Point on the three-category probability simplex.
struct Proportions {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;

  static constexpr double kSumTolerance = 1e-12;

  /// Validating constructor for caller-supplied proportions.
  static Proportions checked(double t1, double t2, double t3) {
    if (!(t1 >= 0.0 && t2 >= 0.0 && t3 >= 0.0) || std::abs(t1 + t2 + t3 - 1.0) > kSumTolerance) {
      throw config_error("proportions must be non-negative and sum to 1");
    }
    return {t1, t2, t3};
  }
};

namespace detail {

// Marsaglia & Tsang (2000) squeeze/rejection sampler; requires shape >= 1.
inline double gamma_shape_ge_one(RngStream& stream, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  boost::random::normal_distribution<double> normal;
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal(stream);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

inline void check_shape(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw config_error("gamma shape must be positive and finite");
  }
}

}  // namespace detail

/// One draw from Gamma(shape, scale = 1).
///
/// Shapes below one use the boost g(a) = g(a + 1) * U^(1/a).
inline double gamma_draw(RngStream& stream, double shape) {
  detail::check_shape(shape);
  if (shape >= 1.0) {
    return detail::gamma_shape_ge_one(stream, shape);
  }
  const double g = detail::gamma_shape_ge_one(stream, shape + 1.0);
  return g * std::pow(stream.uniform_open(), 1.0 / shape);
}

/// Natural log of a Gamma(shape, 1) draw; finite even when the draw itself underflows.
inline double log_gamma_draw(RngStream& stream, double shape) {
  detail::check_shape(shape);
  if (shape >= 1.0) {
    return std::log(detail::gamma_shape_ge_one(stream, shape));
  }
  const double g = detail::gamma_shape_ge_one(stream, shape + 1.0);
  return std::log(g) + std::log(stream.uniform_open()) / shape;
}

/// theta ~ Dirichlet(p) via normalized gamma variates.
inline Proportions dirichlet_draw(RngStream& stream, const DirichletParams& p) {
  const auto& a = p.values();
  if (a[0] >= 1.0 && a[1] >= 1.0 && a[2] >= 1.0) {
    const double g1 = detail::gamma_shape_ge_one(stream, a[0]);
    const double g2 = detail::gamma_shape_ge_one(stream, a[1]);
    const double g3 = detail::gamma_shape_ge_one(stream, a[2]);
    const double total = g1 + g2 + g3;
    return {g1 / total, g2 / total, g3 / total};
  }
  // Small shapes: normalize in log space so tiny gammas cannot all underflow to zero.
  const double l1 = log_gamma_draw(stream, a[0]);
  const double l2 = log_gamma_draw(stream, a[1]);
  const double l3 = log_gamma_draw(stream, a[2]);
  const double top = std::max({l1, l2, l3});
  const double e1 = std::exp(l1 - top);
  const double e2 = std::exp(l2 - top);
  const double e3 = std::exp(l3 - top);
  const double total = e1 + e2 + e3;
  return {e1 / total, e2 / total, e3 / total};
}

/// x ~ Binomial(trials, prob).
inline std::uint64_t binomial_draw(RngStream& stream, std::uint64_t trials, double prob) {
  if (trials == 0 || prob <= 0.0) {
    return 0;
  }
  if (prob >= 1.0) {
    return trials;
  }
  if (trials > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
    throw config_error("binomial trial count too large");
  }
  boost::random::binomial_distribution<std::int64_t, double> binomial(static_cast<std::int64_t>(trials), prob);
  return static_cast<std::uint64_t>(binomial(stream));
}

/// x ~ Multinomial(n, theta) by conditional binomials: x1 ~ Bin(n, t1), x2 ~ Bin(n - x1, t2 / (t2 + t3)).
inline Counts multinomial_draw(RngStream& stream, std::uint64_t n, const Proportions& theta) {
  Counts counts;
  counts.x1 = binomial_draw(stream, n, theta.t1);
  const std::uint64_t rest = n - counts.x1;
  const double tail = theta.t2 + theta.t3;
  counts.x2 = tail > 0.0 ? binomial_draw(stream, rest, theta.t2 / tail) : 0;
  counts.x3 = rest - counts.x2;
  return counts;
}

}  // namespace bnps

#endif  // BAYESNPS_RVGEN_HPP
