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

#include <bayesnps/alc.hpp>

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace {

using bnps::AlcConfig;
using bnps::DirichletParams;
using bnps::RngStream;
using bnps::SearchStrategy;

AlcConfig config(double l_max, double rho, std::size_t L = 1000, std::size_t N = 1000) {
  AlcConfig cfg;
  cfg.l_max = l_max;
  cfg.rho = rho;
  cfg.replications = L;
  cfg.posterior_draws = N;
  return cfg;
}

void expect_predictive_pmf(const DirichletParams& prior, std::uint64_t n, std::uint64_t seed) {
  constexpr std::uint64_t kReps = 100000;
  RngStream stream{seed};
  std::map<bnps::testing::Outcome, std::uint64_t> observed;
  for (std::uint64_t r = 0; r < kReps; ++r) {
    const auto x = bnps::predictive_draw(stream, prior, n);
    ASSERT_EQ(x.n(), n);
    ++observed[{x.x1, x.x2, x.x3}];
  }
  std::vector<std::pair<bnps::testing::Outcome, double>> expected;
  double total = 0.0;
  for (const auto& outcome : bnps::testing::enumerate_outcomes(n)) {
    expected.emplace_back(outcome, bnps::testing::dirichlet_multinomial_pmf(outcome, prior.values()));
    total += expected.back().second;
  }
  ASSERT_NEAR(total, 1.0, 1e-12);
  const auto gof = bnps::testing::chi_square_gof(observed, expected, kReps);
  EXPECT_GT(gof.p_value, 0.01) << "chi2 = " << gof.statistic << " df = " << gof.degrees_of_freedom;
}

TEST(PredictiveDraw, SingleRespondentIsUniformUnderFlatPrior) {
  RngStream stream{1};
  std::array<int, 3> tally{};
  constexpr int kReps = 100000;
  for (int r = 0; r < kReps; ++r) {
    const auto x = bnps::predictive_draw(stream, {1, 1, 1}, 1);
    ++tally[x.x1 == 1 ? 0 : x.x2 == 1 ? 1 : 2];
  }
  const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / kReps);
  for (int t : tally) {
    EXPECT_NEAR(t / static_cast<double>(kReps), 1.0 / 3, 4.0 * se);
  }
  // The Dirichlet-multinomial pmf puts 1/3 on each single-respondent outcome.
  EXPECT_NEAR(bnps::testing::dirichlet_multinomial_pmf({1, 0, 0}, {1, 1, 1}), 1.0 / 3, 1e-12);
}

TEST(PredictiveDraw, MatchesDirichletMultinomialPmf) {
  expect_predictive_pmf({5, 5, 5}, 3, 2);
  expect_predictive_pmf({1, 1, 1}, 1, 3);
  expect_predictive_pmf({2, 5, 8}, 5, 4);
  expect_predictive_pmf({0.5, 0.5, 0.5}, 4, 5);
}

TEST(PredictiveDraw, RejectsZeroSampleSize) {
  RngStream stream;
  EXPECT_THROW(bnps::predictive_draw(stream, {1, 1, 1}, 0), bnps::config_error);
}

TEST(AverageHpdLength, ShrinksForHugeSurveys) {
  const auto cfg = config(0.1, 0.05, 200, 1000);
  const RngStream root{7};
  const double at_10k = bnps::average_hpd_length(root, {1, 1, 1}, 10000, cfg);
  const double at_1m = bnps::average_hpd_length(root, {1, 1, 1}, 1000000, cfg);
  EXPECT_LT(at_1m, 0.01);
  EXPECT_LT(at_1m, at_10k);
}

TEST(AverageHpdLength, TableOneBoundaryCell) {
  // n = 655 is the minimum size for l_max = 0.10, rho = 0.05 under the flat prior.
  const double length = bnps::average_hpd_length(RngStream{}, {1, 1, 1}, 655, config(0.10, 0.05));
  EXPECT_NEAR(length, 0.10, 0.005);
}

TEST(AverageHpdLength, TableTwoBoundaryCell) {
  const double length = bnps::average_hpd_length(RngStream{}, {5, 5, 5}, 139, config(0.20, 0.10));
  EXPECT_NEAR(length, 0.20, 0.01);
}

TEST(AverageHpdLength, NonIncreasingUnderCommonRandomNumbers) {
  const auto cfg = config(0.1, 0.05);
  const RngStream root{11};
  double previous = INFINITY;
  for (std::uint64_t n : {50, 100, 200, 400, 800}) {
    const auto lengths = bnps::replication_hpd_lengths(root, {1, 1, 1}, n, cfg);
    double mean = 0.0;
    for (double l : lengths) {
      mean += l;
    }
    mean /= static_cast<double>(lengths.size());
    double ss = 0.0;
    for (double l : lengths) {
      ss += (l - mean) * (l - mean);
    }
    const double se = std::sqrt(ss / static_cast<double>(lengths.size() - 1) / static_cast<double>(lengths.size()));
    EXPECT_LE(mean, previous + 2.0 * se) << "n = " << n;
    previous = mean;
  }
}

TEST(AverageHpdLength, IndependentOfThreadCount) {
  auto cfg = config(0.1, 0.05, 300, 500);
  const RngStream root{12};
  cfg.threads = 1;
  const double serial = bnps::average_hpd_length(root, {2, 5, 8}, 250, cfg);
  cfg.threads = 5;
  const double parallel = bnps::average_hpd_length(root, {2, 5, 8}, 250, cfg);
  EXPECT_EQ(serial, parallel);
}

TEST(AlcConfig, Validation) {
  EXPECT_NO_THROW(config(2.0, 0.5).validate());
  EXPECT_THROW(config(0.0, 0.05).validate(), bnps::config_error);
  EXPECT_THROW(config(2.5, 0.05).validate(), bnps::config_error);
  EXPECT_THROW(config(0.1, 0.0).validate(), bnps::config_error);
  EXPECT_THROW(config(0.1, 1.0).validate(), bnps::config_error);
  EXPECT_THROW(config(0.1, 0.05, 0, 1000).validate(), bnps::config_error);
  EXPECT_THROW(config(0.1, 0.01, 100, 99).validate(), bnps::config_error);
  EXPECT_NO_THROW(config(0.1, 0.01, 100, 100).validate());
}

TEST(MinSampleSize, TrivialCriterionStopsAtOne) {
  for (auto strategy : {SearchStrategy::LinearScan, SearchStrategy::BracketBisect}) {
    auto cfg = config(2.0, 0.5, 100, 100);
    cfg.strategy = strategy;
    const auto result = bnps::min_sample_size({1, 1, 1}, cfg);
    EXPECT_EQ(result.n_min, 1U);
    ASSERT_FALSE(result.evaluations.empty());
    EXPECT_EQ(result.evaluations.front().n, 1U);
  }
}

TEST(MinSampleSize, TableOneCells) {
  const auto small = bnps::min_sample_size({1, 1, 1}, config(0.20, 0.10));
  EXPECT_NEAR(static_cast<double>(small.n_min), 114.0, 11.4);
  const auto example = bnps::min_sample_size({1, 1, 1}, config(0.10, 0.05));
  EXPECT_NEAR(static_cast<double>(example.n_min), 655.0, 65.5);
}

TEST(MinSampleSize, MirroredPriorsAgree) {
  const auto positive = bnps::min_sample_size({2, 5, 8}, config(0.14, 0.05));
  const auto negative = bnps::min_sample_size({8, 5, 2}, config(0.14, 0.05));
  EXPECT_NEAR(static_cast<double>(positive.n_min), 322.0, 32.2);
  EXPECT_NEAR(static_cast<double>(negative.n_min), 322.0, 32.2);
  EXPECT_NEAR(static_cast<double>(positive.n_min), static_cast<double>(negative.n_min), 0.1 * negative.n_min);
}

TEST(MinSampleSize, ResultInvariants) {
  const auto result = bnps::min_sample_size({5, 5, 5}, config(0.18, 0.10, 400, 400));
  EXPECT_LE(result.avg_length_at_n, result.config.l_max);
  bool has_n = false;
  bool has_predecessor_failing = result.n_min == 1;
  for (const auto& e : result.evaluations) {
    has_n |= e.n == result.n_min && e.avg_length == result.avg_length_at_n;
    has_predecessor_failing |= e.n + 1 == result.n_min && e.avg_length > result.config.l_max;
  }
  EXPECT_TRUE(has_n);
  EXPECT_TRUE(has_predecessor_failing);
}

TEST(MinSampleSize, LinearScanAndBisectionAgree) {
  for (const DirichletParams& prior : {DirichletParams{1, 1, 1}, DirichletParams{8, 5, 2}}) {
    auto cfg = config(0.20, 0.10, 250, 250);
    cfg.strategy = SearchStrategy::LinearScan;
    const auto linear = bnps::min_sample_size(prior, cfg);
    cfg.strategy = SearchStrategy::BracketBisect;
    const auto bisect = bnps::min_sample_size(prior, cfg);
    EXPECT_EQ(linear.evaluations.size(), linear.n_min);
    EXPECT_LE(linear.n_min, bisect.n_min);
    EXPECT_NEAR(static_cast<double>(linear.n_min), static_cast<double>(bisect.n_min), 0.05 * bisect.n_min);
    EXPECT_LT(bisect.evaluations.size(), 30U);
  }
}

TEST(MinSampleSize, MonotoneInLmaxAndRho) {
  const std::vector<double> lmaxes{0.14, 0.17, 0.20};
  const std::vector<double> rhos{0.05, 0.10};
  std::vector<std::vector<std::uint64_t>> n(lmaxes.size(), std::vector<std::uint64_t>(rhos.size()));
  for (std::size_t i = 0; i < lmaxes.size(); ++i) {
    for (std::size_t k = 0; k < rhos.size(); ++k) {
      n[i][k] = bnps::min_sample_size({1, 1, 1}, config(lmaxes[i], rhos[k], 300, 300)).n_min;
    }
  }
  for (std::size_t i = 0; i < lmaxes.size(); ++i) {
    for (std::size_t k = 0; k < rhos.size(); ++k) {
      if (i + 1 < lmaxes.size()) {
        EXPECT_GE(n[i][k], n[i + 1][k]);
      }
      if (k + 1 < rhos.size()) {
        EXPECT_GE(n[i][k], n[i][k + 1]);
      }
    }
  }
}

TEST(MinSampleSize, NonConvergenceAtCap) {
  for (auto strategy : {SearchStrategy::LinearScan, SearchStrategy::BracketBisect}) {
    auto cfg = config(0.01, 0.05, 50, 100);
    cfg.max_n = 40;
    cfg.strategy = strategy;
    EXPECT_THROW(bnps::min_sample_size({1, 1, 1}, cfg), bnps::convergence_error);
  }
}

TEST(MinSampleSize, DeterministicForSeed) {
  auto cfg = config(0.18, 0.05, 200, 300);
  cfg.seed = 77;
  const auto a = bnps::min_sample_size({1, 1, 1}, cfg);
  cfg.threads = 3;
  const auto b = bnps::min_sample_size({1, 1, 1}, cfg);
  EXPECT_EQ(a.n_min, b.n_min);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(AlcResult, JsonRoundTrip) {
  auto cfg = config(0.2, 0.1, 100, 100);
  cfg.strategy = SearchStrategy::LinearScan;
  const auto result = bnps::min_sample_size({2, 5, 8}, cfg);
  const nlohmann::ordered_json j = result;
  const auto back = nlohmann::ordered_json::parse(j.dump()).get<bnps::AlcResult>();
  EXPECT_EQ(back.n_min, result.n_min);
  EXPECT_EQ(back.avg_length_at_n, result.avg_length_at_n);
  EXPECT_EQ(back.evaluations, result.evaluations);
  EXPECT_EQ(back.config.strategy, SearchStrategy::LinearScan);
  EXPECT_EQ(nlohmann::ordered_json(back).dump(), j.dump());
}

}  // namespace
