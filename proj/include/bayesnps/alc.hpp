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

#ifndef BAYESNPS_ALC_HPP
#define BAYESNPS_ALC_HPP

/**
 * \file
 * \brief Average length criterion (ALC) and minimum sample-size search for the net promoter score.
 *
 * For a candidate survey size n, the expected HPD length under the prior predictive distribution of
 * the counts is estimated by simulation: draw theta from the prior, draw counts given theta, update
 * the prior, sample the posterior of Delta, and measure the HPD length. The minimum sample size is the
 * smallest n whose average length over L replications does not exceed l_max.
 *
 * Evaluations at different n share random numbers: replication r always uses the same theta draw and
 * the same posterior stream, and its counts stream is keyed by (r, n). The estimated curve is then
 * a deterministic function of (seed, n), smooth enough in n for bisection.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <bayesnps/errors.hpp>
#include <bayesnps/hpd.hpp>
#include <bayesnps/model.hpp>
#include <bayesnps/parallel.hpp>
#include <bayesnps/rvgen.hpp>

namespace bnps {

enum class SearchStrategy {
  LinearScan,     ///< n = 1, 2, 3, ... until the criterion holds
  BracketBisect,  ///< double n until the criterion holds, then bisect
};

inline std::string to_string(SearchStrategy strategy) {
  return strategy == SearchStrategy::LinearScan ? "linear" : "bisect";
}

inline SearchStrategy parse_strategy(const std::string& name) {
  if (name == "linear") {
    return SearchStrategy::LinearScan;
  }
  if (name == "bisect") {
    return SearchStrategy::BracketBisect;
  }
  throw config_error("unknown search strategy '" + name + "' (expected linear or bisect)");
}

struct AlcConfig {
  double l_max = 0.10;
  double rho = 0.05;
  std::size_t replications = 1000;     ///< L, predictive replications per candidate n
  std::size_t posterior_draws = 1000;  ///< N, posterior draws per replication
  std::uint64_t seed = RngStream::kDefaultSeed;
  SearchStrategy strategy = SearchStrategy::BracketBisect;
  std::uint64_t max_n = 1'000'000;
  unsigned threads = 1;  ///< worker cap; never affects results

  void validate() const {
    if (!(l_max > 0.0 && l_max <= 2.0)) {
      throw config_error("l_max must lie in (0, 2]");
    }
    if (!(rho > 0.0 && rho < 1.0)) {
      throw config_error("rho must lie in (0, 1)");
    }
    if (replications == 0) {
      throw config_error("L (replications) must be at least 1");
    }
    if (posterior_draws < static_cast<std::size_t>(std::ceil(1.0 / rho - 1e-9))) {
      throw config_error("N (posterior draws) must be at least ceil(1/rho)");
    }
    if (max_n == 0) {
      throw config_error("sample-size cap must be at least 1");
    }
  }
};

struct AlcEvaluation {
  std::uint64_t n = 0;
  double avg_length = 0.0;

  friend bool operator==(const AlcEvaluation&, const AlcEvaluation&) = default;
};

struct AlcResult {
  std::uint64_t n_min = 0;
  double avg_length_at_n = 0.0;
  std::vector<AlcEvaluation> evaluations;  ///< in the order they were computed
  AlcConfig config;
};

/// One draw from the prior predictive of the counts: theta ~ Dir(prior), then x ~ Mult(n, theta).
inline Counts predictive_draw(RngStream& stream, const DirichletParams& prior, std::uint64_t n) {
  if (n == 0) {
    throw config_error("predictive draws need a sample size of at least 1");
  }
  const auto theta = dirichlet_draw(stream, prior);
  return multinomial_draw(stream, n, theta);
}

namespace detail {

enum StreamRole : std::uint64_t { kThetaRole = 1, kCountsRole = 2, kPosteriorRole = 3 };

}  // namespace detail

/// HPD length of each of the L predictive replications at survey size n, in replication order.
inline std::vector<double> replication_hpd_lengths(const RngStream& stream, const DirichletParams& prior,
                                                   std::uint64_t n, const AlcConfig& cfg) {
  cfg.validate();
  if (n == 0) {
    throw config_error("sample size must be at least 1");
  }
  const auto theta_root = stream.substream(detail::kThetaRole);
  const auto counts_root = stream.substream(detail::kCountsRole);
  const auto posterior_root = stream.substream(detail::kPosteriorRole);

  std::vector<double> lengths(cfg.replications);
  parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
    auto theta_stream = theta_root.substream(r);
    auto counts_stream = counts_root.substream(r).substream(n);
    auto posterior_stream = posterior_root.substream(r);

    const auto theta = dirichlet_draw(theta_stream, prior);
    const auto counts = multinomial_draw(counts_stream, n, theta);
    const auto posterior = update_posterior(prior, counts);

    thread_local std::vector<double> draws;
    draws.clear();
    draws.reserve(cfg.posterior_draws);
    detail::append_delta_draws(posterior_stream, posterior, cfg.posterior_draws, draws);
    std::sort(draws.begin(), draws.end());
    lengths[r] = hpd_length(draws, cfg.rho);
  });
  return lengths;
}

/// Monte Carlo estimate of the expected HPD length at survey size n.
inline double average_hpd_length(const RngStream& stream, const DirichletParams& prior, std::uint64_t n,
                                 const AlcConfig& cfg) {
  const auto lengths = replication_hpd_lengths(stream, prior, n, cfg);
  double total = 0.0;
  for (double length : lengths) {
    total += length;
  }
  return total / static_cast<double>(lengths.size());
}

/// Smallest n with average_hpd_length(n) <= l_max under the configured search strategy.
inline AlcResult min_sample_size(const DirichletParams& prior, const AlcConfig& cfg) {
  cfg.validate();
  const RngStream root{cfg.seed};

  AlcResult result;
  result.config = cfg;
  std::map<std::uint64_t, double> memo;
  auto curve = [&](std::uint64_t n) {
    if (auto it = memo.find(n); it != memo.end()) {
      return it->second;
    }
    const double value = average_hpd_length(root, prior, n, cfg);
    memo.emplace(n, value);
    result.evaluations.push_back({n, value});
    return value;
  };
  auto holds = [&](std::uint64_t n) { return curve(n) <= cfg.l_max; };
  auto fail_to_converge = [&] {
    throw convergence_error("average HPD length still exceeds l_max at the sample-size cap n = " +
                            std::to_string(cfg.max_n));
  };

  std::uint64_t n = 1;
  if (cfg.strategy == SearchStrategy::LinearScan) {
    while (!holds(n)) {
      if (n == cfg.max_n) {
        fail_to_converge();
      }
      ++n;
    }
  } else {
    // Bracket: lo fails (or is 0), hi holds.
    std::uint64_t lo = 0;
    std::uint64_t hi = 1;
    while (!holds(hi)) {
      if (hi == cfg.max_n) {
        fail_to_converge();
      }
      lo = hi;
      hi = std::min(hi * 2, cfg.max_n);
    }
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      (holds(mid) ? hi : lo) = mid;
    }
    // Pin the boundary on the memoized curve: step down while the criterion still holds.
    n = hi;
    while (n > 1 && holds(n - 1)) {
      --n;
    }
  }

  result.n_min = n;
  result.avg_length_at_n = memo.at(n);
  return result;
}

inline void to_json(nlohmann::ordered_json& j, const AlcConfig& cfg) {
  j = nlohmann::ordered_json{{"l_max", cfg.l_max},
                             {"rho", cfg.rho},
                             {"L", cfg.replications},
                             {"N", cfg.posterior_draws},
                             {"seed", cfg.seed},
                             {"strategy", to_string(cfg.strategy)},
                             {"max_n", cfg.max_n}};
}

inline void to_json(nlohmann::ordered_json& j, const AlcResult& result) {
  auto trace = nlohmann::ordered_json::array();
  for (const auto& e : result.evaluations) {
    trace.push_back({{"n", e.n}, {"avg_length", e.avg_length}});
  }
  j = nlohmann::ordered_json{{"n_min", result.n_min},
                             {"avg_length_at_n", result.avg_length_at_n},
                             {"evaluations", std::move(trace)},
                             {"config", result.config}};
}

inline void from_json(const nlohmann::ordered_json& j, AlcConfig& cfg) {
  cfg.l_max = j.at("l_max").get<double>();
  cfg.rho = j.at("rho").get<double>();
  cfg.replications = j.at("L").get<std::size_t>();
  cfg.posterior_draws = j.at("N").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());
  cfg.max_n = j.at("max_n").get<std::uint64_t>();
}

inline void from_json(const nlohmann::ordered_json& j, AlcResult& result) {
  result.n_min = j.at("n_min").get<std::uint64_t>();
  result.avg_length_at_n = j.at("avg_length_at_n").get<double>();
  result.evaluations.clear();
  for (const auto& e : j.at("evaluations")) {
    result.evaluations.push_back({e.at("n").get<std::uint64_t>(), e.at("avg_length").get<double>()});
  }
  result.config = j.at("config").get<AlcConfig>();
}

}  // namespace bnps

#endif  // BAYESNPS_ALC_HPP
