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

#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <bayesnps/bayesnps.hpp>

namespace bnps::cli {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    const auto first = part.find_first_not_of(" \t");
    const auto last = part.find_last_not_of(" \t");
    parts.push_back(first == std::string::npos ? std::string{} : part.substr(first, last - first + 1));
  }
  return parts;
}

double parse_real(const std::string& text, const std::string& flag) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
    throw config_error(flag + ": '" + text + "' is not a number");
  }
  return value;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  for (const auto& part : split_commas(text)) {
    values.push_back(parse_real(part, flag));
  }
  if (values.empty()) {
    throw config_error(flag + " expects a comma-separated list of numbers");
  }
  return values;
}

DirichletParams parse_prior(const std::string& text) {
  const auto values = parse_real_list(text, "--prior");
  if (values.size() != 3) {
    throw config_error("--prior expects three positive numbers a1,a2,a3");
  }
  return {values[0], values[1], values[2]};
}

Counts parse_counts(const std::string& text) {
  const auto parts = split_commas(text);
  if (parts.size() != 3) {
    throw config_error("--counts expects three non-negative integers x1,x2,x3");
  }
  std::array<std::uint64_t, 3> x{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = parts[i];
    const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), x[i]);
    if (p.empty() || ec != std::errc{} || end != p.data() + p.size()) {
      throw config_error("--counts: '" + p + "' is not a non-negative integer");
    }
  }
  return {x[0], x[1], x[2]};
}

std::string format_params(const DirichletParams& p) { return fmt::format("Dir({}, {}, {})", p.a1(), p.a2(), p.a3()); }

// Grid values print with two decimals when that is exact (0.10, 0.05), shortest form otherwise.
std::string format_grid_value(double v) {
  const double hundredths = v * 100.0;
  if (std::abs(hundredths - std::round(hundredths)) < 1e-9) {
    return fmt::format("{:.2f}", v);
  }
  return fmt::format("{}", v);
}

nlohmann::ordered_json interval_to_json(const CredibleInterval& interval) {
  nlohmann::ordered_json j{{"lower", interval.lower},
                           {"upper", interval.upper},
                           {"method", to_string(interval.method)}};
  if (interval.method == IntervalMethod::Moment) {
    j["gamma"] = interval.level_or_gamma;
    j["clipped"] = interval.clipped;
  } else {
    j["level"] = interval.level_or_gamma;
  }
  return j;
}

CredibleInterval interval_from_json(const nlohmann::ordered_json& j) {
  CredibleInterval interval;
  interval.lower = j.at("lower").get<double>();
  interval.upper = j.at("upper").get<double>();
  const auto method = j.at("method").get<std::string>();
  if (method == "moment") {
    interval.method = IntervalMethod::Moment;
    interval.level_or_gamma = j.at("gamma").get<double>();
    interval.clipped = j.at("clipped").get<bool>();
  } else if (method == "hpd") {
    interval.method = IntervalMethod::Hpd;
    interval.level_or_gamma = j.at("level").get<double>();
  } else {
    throw data_error("unknown interval method '" + method + "'");
  }
  return interval;
}

struct EstimateArgs {
  std::string counts;
  std::string scores;
  std::string prior = "1,1,1";
  std::string state;
  std::string label;
  std::string where_label;
  double rho = 0.05;
  double gamma = 1.96;
  std::uint64_t draws = 10000;
  std::uint64_t seed = RngStream::kDefaultSeed;
  unsigned threads = 0;
  bool json = false;
  bool timing = false;
};

struct SampleSizeArgs {
  double lmax = 0.0;
  double rho = 0.05;
  std::string prior = "1,1,1";
  std::size_t replications = 1000;
  std::size_t posterior_draws = 1000;
  std::uint64_t seed = RngStream::kDefaultSeed;
  std::string strategy = "bisect";
  std::uint64_t max_n = 1'000'000;
  unsigned threads = 0;
  bool json = false;
};

struct TablesArgs {
  std::string prior = "1,1,1";
  std::string lmax_grid;
  std::string rho_grid;
  bool cheap = false;
  bool full_tables = false;
  std::size_t replications = 1000;
  std::size_t posterior_draws = 1000;
  std::uint64_t seed = RngStream::kDefaultSeed;
  std::string strategy = "bisect";
  std::uint64_t max_n = 1'000'000;
  std::string format = "csv";
  unsigned threads = 0;
  bool json = false;
};

int cmd_estimate(const EstimateArgs& args, bool prior_given, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (args.counts.empty() == args.scores.empty()) {
    throw config_error("estimate needs exactly one of --counts or --scores");
  }

  std::optional<PosteriorState> state;
  if (!args.state.empty() && std::filesystem::exists(args.state)) {
    if (prior_given) {
      throw config_error("--prior cannot be combined with an existing --state file; the state's posterior is the prior");
    }
    state = load_state(args.state);
  } else if (!args.state.empty()) {
    state.emplace(parse_prior(args.prior));
  }
  const DirichletParams prior = state ? state->params() : parse_prior(args.prior);

  Counts counts;
  if (!args.counts.empty()) {
    counts = parse_counts(args.counts);
  } else {
    auto records = read_scores_csv(args.scores);
    if (!args.where_label.empty()) {
      std::erase_if(records, [&](const SurveyRecord& r) { return r.label.value_or("") != args.where_label; });
    }
    counts = tally_scores(records);
  }

  if (!(args.rho > 0.0 && args.rho < 1.0)) {
    throw config_error("--rho must lie in (0, 1)");
  }
  if (args.draws == 0) {
    throw config_error("--draws must be positive");
  }

  CliReport report;
  report.counts = counts;
  report.posterior = update_posterior(prior, counts);
  report.point_estimate = posterior_mean(report.posterior);
  report.posterior_variance = posterior_variance(report.posterior);
  report.moment_interval = moment_interval(report.posterior, args.gamma);
  const auto sample = sample_delta(RngStream{args.seed}, report.posterior, args.draws, args.threads);
  report.mc_point_estimate = sample.mean();
  report.hpd = hpd_interval(sample, args.rho);
  report.draws = args.draws;
  report.seed = args.seed;

  if (state) {
    const std::string label =
        args.label.empty() ? fmt::format("batch-{}", state->history().size() + 1) : args.label;
    state->apply(label, counts);
    save_state(*state, args.state);
  }

  report.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

  if (args.json) {
    out << report_to_json(report, args.timing).dump(2) << "\n";
    return kSuccess;
  }
  const auto& mi = report.moment_interval;
  out << fmt::format("counts            {} detractors, {} passives, {} promoters (n = {})\n", counts.x1, counts.x2,
                     counts.x3, counts.n());
  out << fmt::format("posterior         {}\n", format_params(report.posterior));
  out << fmt::format("point estimate    {:.6f}  (closed-form posterior mean)\n", report.point_estimate);
  out << fmt::format("MC mean           {:.6f}  ({} draws)\n", report.mc_point_estimate, report.draws);
  out << fmt::format("posterior sd      {:.6f}\n", std::sqrt(report.posterior_variance));
  out << fmt::format("moment interval   [{:.6f}, {:.6f}]  gamma = {}{}\n", mi.lower, mi.upper, mi.level_or_gamma,
                     mi.clipped ? "  (clipped to [-1, 1])" : "");
  out << fmt::format("HPD interval      [{:.6f}, {:.6f}]  level = {}\n", report.hpd.lower, report.hpd.upper,
                     report.hpd.level_or_gamma);
  out << fmt::format("seed              {}\n", report.seed);
  out << fmt::format("runtime           {} ms\n", report.runtime_ms);
  if (state) {
    out << fmt::format("state             {} ({} batches)\n", args.state, state->history().size());
  }
  return kSuccess;
}

AlcConfig make_config(double lmax, double rho, std::size_t replications, std::size_t posterior_draws,
                      std::uint64_t seed, const std::string& strategy, std::uint64_t max_n, unsigned threads) {
  AlcConfig cfg;
  cfg.l_max = lmax;
  cfg.rho = rho;
  cfg.replications = replications;
  cfg.posterior_draws = posterior_draws;
  cfg.seed = seed;
  cfg.strategy = parse_strategy(strategy);
  cfg.max_n = max_n;
  cfg.threads = threads;
  return cfg;
}

int cmd_samplesize(const SampleSizeArgs& args, std::ostream& out) {
  const auto prior = parse_prior(args.prior);
  const auto cfg = make_config(args.lmax, args.rho, args.replications, args.posterior_draws, args.seed,
                               args.strategy, args.max_n, args.threads);
  const auto result = min_sample_size(prior, cfg);

  if (args.json) {
    nlohmann::ordered_json j = result;
    j["prior"] = prior.values();
    out << j.dump(2) << "\n";
    return kSuccess;
  }
  out << fmt::format("minimum sample size  {}\n", result.n_min);
  out << fmt::format("average HPD length   {:.6f}  (l_max = {}, level = {})\n", result.avg_length_at_n, cfg.l_max,
                     1.0 - cfg.rho);
  out << fmt::format("prior                {}\n", format_params(prior));
  out << fmt::format("L = {}, N = {}, strategy = {}, seed = {}\n", cfg.replications, cfg.posterior_draws,
                     to_string(cfg.strategy), cfg.seed);
  out << "evaluations (n, average HPD length):\n";
  for (const auto& e : result.evaluations) {
    out << fmt::format("  {:>8}  {:.6f}\n", e.n, e.avg_length);
  }
  return kSuccess;
}

int cmd_tables(const TablesArgs& args, std::ostream& out) {
  const auto prior = parse_prior(args.prior);
  auto lmax_grid = args.lmax_grid.empty() || args.full_tables ? default_lmax_grid()
                                                              : parse_real_list(args.lmax_grid, "--lmax-grid");
  const auto rho_grid = args.rho_grid.empty() || args.full_tables ? default_rho_grid()
                                                                  : parse_real_list(args.rho_grid, "--rho-grid");
  if (args.cheap && !args.full_tables) {
    std::erase_if(lmax_grid, [](double l) { return l < 0.10 - 1e-12; });
  }
  if (lmax_grid.empty()) {
    throw config_error("no l_max values left in the grid");
  }
  const auto base = make_config(lmax_grid.front(), rho_grid.front(), args.replications, args.posterior_draws,
                                args.seed, args.strategy, args.max_n, args.threads);
  const auto cells = compute_table(prior, lmax_grid, rho_grid, base);

  if (args.json) {
    nlohmann::ordered_json j;
    j["prior"] = prior.values();
    j["config"] = base;
    j["config"].erase("l_max");
    j["config"].erase("rho");
    auto rows = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
      rows.push_back({{"l_max", c.l_max}, {"rho", c.rho}, {"n_min", c.n_min}, {"avg_length_at_n", c.avg_length_at_n}});
    }
    j["cells"] = std::move(rows);
    out << j.dump(2) << "\n";
  } else if (args.format == "markdown") {
    out << format_table_markdown(cells);
  } else {
    out << format_table_csv(cells);
  }
  return kSuccess;
}

}  // namespace

nlohmann::ordered_json report_to_json(const CliReport& report, bool include_timing) {
  nlohmann::ordered_json j{{"counts", {report.counts.x1, report.counts.x2, report.counts.x3}},
                           {"posterior", report.posterior.values()},
                           {"point_estimate", report.point_estimate},
                           {"mc_point_estimate", report.mc_point_estimate},
                           {"posterior_variance", report.posterior_variance},
                           {"moment_interval", interval_to_json(report.moment_interval)},
                           {"hpd", interval_to_json(report.hpd)},
                           {"draws", report.draws},
                           {"seed", report.seed}};
  if (include_timing) {
    j["runtime_ms"] = report.runtime_ms;
  }
  return j;
}

CliReport report_from_json(const nlohmann::ordered_json& j) {
  CliReport report;
  const auto counts = j.at("counts").get<std::array<std::uint64_t, 3>>();
  report.counts = {counts[0], counts[1], counts[2]};
  report.posterior = DirichletParams{j.at("posterior").get<std::array<double, 3>>()};
  report.point_estimate = j.at("point_estimate").get<double>();
  report.mc_point_estimate = j.at("mc_point_estimate").get<double>();
  report.posterior_variance = j.at("posterior_variance").get<double>();
  report.moment_interval = interval_from_json(j.at("moment_interval"));
  report.hpd = interval_from_json(j.at("hpd"));
  report.draws = j.at("draws").get<std::uint64_t>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.runtime_ms = j.value("runtime_ms", std::int64_t{0});
  return report;
}

std::vector<double> default_lmax_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) {
    grid.push_back(k / 50.0);
  }
  return grid;
}

std::vector<double> default_rho_grid() { return {0.01, 0.05, 0.10}; }

std::vector<TableCell> compute_table(const DirichletParams& prior, const std::vector<double>& lmax_grid,
                                     const std::vector<double>& rho_grid, const AlcConfig& base) {
  std::vector<TableCell> cells;
  for (double lmax : lmax_grid) {
    for (double rho : rho_grid) {
      auto cfg = base;
      cfg.l_max = lmax;
      cfg.rho = rho;
      const auto result = min_sample_size(prior, cfg);
      cells.push_back({lmax, rho, result.n_min, result.avg_length_at_n});
    }
  }
  return cells;
}

namespace {

// Distinct values in first-seen order.
template <class Projection>
std::vector<double> axis(const std::vector<TableCell>& cells, Projection project) {
  std::vector<double> values;
  for (const auto& c : cells) {
    const double v = project(c);
    if (std::find(values.begin(), values.end(), v) == values.end()) {
      values.push_back(v);
    }
  }
  return values;
}

std::string cell_text(const std::vector<TableCell>& cells, double lmax, double rho) {
  for (const auto& c : cells) {
    if (c.l_max == lmax && c.rho == rho) {
      return std::to_string(c.n_min);
    }
  }
  return "";
}

}  // namespace

std::string format_table_csv(const std::vector<TableCell>& cells) {
  const auto lmaxes = axis(cells, [](const TableCell& c) { return c.l_max; });
  const auto rhos = axis(cells, [](const TableCell& c) { return c.rho; });
  std::string text = "l_max";
  for (double rho : rhos) {
    text += "," + format_grid_value(rho);
  }
  text += "\n";
  for (double lmax : lmaxes) {
    text += format_grid_value(lmax);
    for (double rho : rhos) {
      text += "," + cell_text(cells, lmax, rho);
    }
    text += "\n";
  }
  return text;
}

std::string format_table_markdown(const std::vector<TableCell>& cells) {
  const auto lmaxes = axis(cells, [](const TableCell& c) { return c.l_max; });
  const auto rhos = axis(cells, [](const TableCell& c) { return c.rho; });
  std::string text = "| l_max \\ rho |";
  std::string rule = "|---|";
  for (double rho : rhos) {
    text += " " + format_grid_value(rho) + " |";
    rule += "---:|";
  }
  text += "\n" + rule + "\n";
  for (double lmax : lmaxes) {
    text += "| " + format_grid_value(lmax) + " |";
    for (double rho : rhos) {
      text += " " + cell_text(cells, lmax, rho) + " |";
    }
    text += "\n";
  }
  return text;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian net promoter score estimation and survey sample-size determination", "bayesnps"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Posterior point and interval estimates of the NPS");
  auto* counts_opt = estimate->add_option("--counts", est.counts, "Detractor, passive, promoter counts x1,x2,x3");
  auto* scores_opt = estimate->add_option("--scores", est.scores, "CSV file with a 'score' column (0-10)");
  counts_opt->excludes(scores_opt);
  auto* prior_opt =
      estimate->add_option("--prior", est.prior, "Dirichlet prior a1,a2,a3")->capture_default_str();
  estimate->add_option("--rho", est.rho, "HPD interval has coverage 1 - rho")->capture_default_str();
  estimate->add_option("--gamma", est.gamma, "Moment interval multiplier")->capture_default_str();
  estimate->add_option("--draws", est.draws, "Posterior Monte Carlo draws")->capture_default_str();
  estimate->add_option("--seed", est.seed, "Random seed")->capture_default_str();
  estimate->add_option("--state", est.state, "JSON state file for sequential updating (created if missing)");
  estimate->add_option("--label", est.label, "History label for this batch when --state is used");
  estimate->add_option("--where-label", est.where_label, "Only tally CSV rows whose label column matches");
  estimate->add_option("--threads", est.threads, "Worker cap (0 = all cores); never changes results");
  estimate->add_flag("--json", est.json, "Machine-readable output");
  estimate->add_flag("--timing", est.timing, "Include runtime_ms in JSON output");

  SampleSizeArgs ss;
  auto* samplesize = app.add_subcommand("samplesize", "Minimum sample size by the average length criterion");
  samplesize->add_option("--lmax", ss.lmax, "Maximum admissible average HPD length")->required();
  samplesize->add_option("--rho", ss.rho, "HPD interval has coverage 1 - rho")->capture_default_str();
  samplesize->add_option("--prior", ss.prior, "Dirichlet prior a1,a2,a3")->capture_default_str();
  samplesize->add_option("--L", ss.replications, "Predictive replications per candidate n")->capture_default_str();
  samplesize->add_option("--N", ss.posterior_draws, "Posterior draws per replication")->capture_default_str();
  samplesize->add_option("--seed", ss.seed, "Random seed")->capture_default_str();
  samplesize->add_option("--strategy", ss.strategy, "Search strategy: linear or bisect")->capture_default_str();
  samplesize->add_option("--max-n", ss.max_n, "Give up beyond this sample size")->capture_default_str();
  samplesize->add_option("--threads", ss.threads, "Worker cap (0 = all cores); never changes results");
  samplesize->add_flag("--json", ss.json, "Machine-readable output");

  TablesArgs tb;
  auto* tables = app.add_subcommand("tables", "Grid of minimum sample sizes over l_max and rho");
  tables->add_option("--prior", tb.prior, "Dirichlet prior a1,a2,a3")->capture_default_str();
  tables->add_option("--lmax-grid", tb.lmax_grid, "Comma-separated l_max values (default 0.02,0.04,...,0.20)");
  tables->add_option("--rho-grid", tb.rho_grid, "Comma-separated rho values (default 0.01,0.05,0.10)");
  tables->add_flag("--cheap", tb.cheap, "Keep only l_max >= 0.10");
  tables->add_flag("--full-tables", tb.full_tables, "Full default grid, ignoring --cheap and custom grids");
  tables->add_option("--L", tb.replications, "Predictive replications per candidate n")->capture_default_str();
  tables->add_option("--N", tb.posterior_draws, "Posterior draws per replication")->capture_default_str();
  tables->add_option("--seed", tb.seed, "Random seed")->capture_default_str();
  tables->add_option("--strategy", tb.strategy, "Search strategy: linear or bisect")->capture_default_str();
  tables->add_option("--max-n", tb.max_n, "Give up beyond this sample size")->capture_default_str();
  tables->add_option("--format", tb.format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();
  tables->add_option("--threads", tb.threads, "Worker cap (0 = all cores); never changes results");
  tables->add_flag("--json", tb.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*estimate) {
      return cmd_estimate(est, prior_opt->count() > 0, out);
    }
    if (*samplesize) {
      return cmd_samplesize(ss, out);
    }
    return cmd_tables(tb, out);
  } catch (const config_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const data_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const convergence_error& e) {
    err << "error: " << e.what() << "\n";
    return kNonConvergence;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("bayesnps");
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace bnps::cli
