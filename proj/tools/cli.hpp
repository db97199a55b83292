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

#ifndef BAYESNPS_TOOLS_CLI_HPP
#define BAYESNPS_TOOLS_CLI_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <bayesnps/alc.hpp>
#include <bayesnps/model.hpp>

namespace bnps::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kNonConvergence = 4,
};

/// Everything `estimate` reports for one posterior.
struct CliReport {
  Counts counts;
  DirichletParams posterior{1.0, 1.0, 1.0};
  double point_estimate = 0.0;     ///< closed-form posterior mean
  double mc_point_estimate = 0.0;  ///< mean of the Monte Carlo draws
  double posterior_variance = 0.0;
  CredibleInterval moment_interval;
  CredibleInterval hpd;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
};

nlohmann::ordered_json report_to_json(const CliReport& report, bool include_timing);
CliReport report_from_json(const nlohmann::ordered_json& j);

/// One cell of a reproduced sample-size table.
struct TableCell {
  double l_max = 0.0;
  double rho = 0.0;
  std::uint64_t n_min = 0;
  double avg_length_at_n = 0.0;
};

/// Grid of l_max values 0.02, 0.04, ..., 0.20.
std::vector<double> default_lmax_grid();
/// rho values 0.01, 0.05, 0.10.
std::vector<double> default_rho_grid();

/// Minimum sample sizes for every (l_max, rho) pair, rows ordered by l_max then rho.
std::vector<TableCell> compute_table(const DirichletParams& prior, const std::vector<double>& lmax_grid,
                                     const std::vector<double>& rho_grid, const AlcConfig& base);

/// Table in the layout rows = l_max, columns = rho.
std::string format_table_csv(const std::vector<TableCell>& cells);
std::string format_table_markdown(const std::vector<TableCell>& cells);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bnps::cli

#endif  // BAYESNPS_TOOLS_CLI_HPP
