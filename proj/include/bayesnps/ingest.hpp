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

#ifndef BAYESNPS_INGEST_HPP
#define BAYESNPS_INGEST_HPP

/**
 * \file
 * \brief Survey score ingestion and persisted posterior state for sequential updating.
 *
 * Survey CSV: UTF-8, comma separated, LF or CRLF line endings, a header row, an integer `score`
 * column (0-10) and an optional `label` column. Double-quoted fields are accepted.
 *
 * State file (JSON, pretty-printed, fixed key order):
 *
 *     {
 *       "format_version": 1,
 *       "prior": [a1, a2, a3],
 *       "alpha": [a1, a2, a3],
 *       "history": [{"label": "Q1", "counts": [x1, x2, x3]}, ...]
 *     }
 *
 * `alpha` must equal `prior` plus the component-wise sum of all history counts.
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <bayesnps/errors.hpp>
#include <bayesnps/model.hpp>

namespace bnps {

enum class Category { Detractor, Passive, Promoter };

inline std::string to_string(Category category) {
  switch (category) {
    case Category::Detractor:
      return "detractor";
    case Category::Passive:
      return "passive";
    case Category::Promoter:
      return "promoter";
  }
  return "unknown";
}

/// 0-6 detractor, 7-8 passive, 9-10 promoter.
inline Category categorize_score(int score) {
  if (score < 0 || score > 10) {
    throw data_error("score " + std::to_string(score) + " is outside the 0-10 scale");
  }
  if (score <= 6) {
    return Category::Detractor;
  }
  return score <= 8 ? Category::Passive : Category::Promoter;
}

struct SurveyRecord {
  int score = 0;
  std::optional<std::string> label;
};

inline Counts tally_scores(const std::vector<SurveyRecord>& records) {
  Counts counts;
  for (const auto& record : records) {
    switch (categorize_score(record.score)) {
      case Category::Detractor:
        ++counts.x1;
        break;
      case Category::Passive:
        ++counts.x2;
        break;
      case Category::Promoter:
        ++counts.x3;
        break;
    }
  }
  return counts;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_number) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw data_error("row " + std::to_string(line_number) + ": unterminated quoted field");
  }
  fields.push_back(std::move(field));
  return fields;
}

}  // namespace detail

/// Reads survey records from CSV text. Row numbers in errors count the header as row 1.
inline std::vector<SurveyRecord> read_scores_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  std::optional<std::size_t> score_column;
  std::optional<std::size_t> label_column;
  std::size_t columns = 0;
  std::vector<SurveyRecord> records;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line_number == 1 && line.starts_with("\xEF\xBB\xBF")) {
      line.erase(0, 3);
    }
    if (detail::trim(line).empty()) {
      continue;
    }
    auto fields = detail::split_csv_line(line, line_number);

    if (!score_column) {
      columns = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto name = detail::trim(fields[i]);
        if (name == "score") {
          score_column = i;
        } else if (name == "label") {
          label_column = i;
        }
      }
      if (!score_column) {
        throw data_error("row " + std::to_string(line_number) + ": header has no 'score' column");
      }
      continue;
    }

    const std::string row = "row " + std::to_string(line_number);
    if (fields.size() != columns) {
      throw data_error(row + ": expected " + std::to_string(columns) + " fields, found " +
                       std::to_string(fields.size()));
    }
    const auto text = detail::trim(fields[*score_column]);
    if (text.empty()) {
      throw data_error(row + ": missing score");
    }
    int score = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), score);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      throw data_error(row + ": score '" + std::string(text) + "' is not an integer");
    }
    if (score < 0 || score > 10) {
      throw data_error(row + ": score " + std::to_string(score) + " is outside the 0-10 scale");
    }
    SurveyRecord record{score, std::nullopt};
    if (label_column) {
      record.label = std::string(detail::trim(fields[*label_column]));
    }
    records.push_back(std::move(record));
  }
  if (!score_column) {
    throw data_error("survey file is empty: a header row with a 'score' column is required");
  }
  return records;
}

inline std::vector<SurveyRecord> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw data_error("cannot open survey file " + path.string());
  }
  try {
    return read_scores_csv(in);
  } catch (const data_error& e) {
    throw data_error(path.string() + ": " + e.what());
  }
}

/// Raised when a state file parses but its alpha disagrees with prior + history.
class state_invariant_error : public data_error {
 public:
  using data_error::data_error;
};

struct HistoryEntry {
  std::string label;
  Counts counts;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Prior, current posterior and the batches applied so far.
class PosteriorState {
 public:
  static constexpr int kFormatVersion = 1;

  explicit PosteriorState(DirichletParams prior) : prior_{prior}, params_{prior} {}

  PosteriorState(DirichletParams prior, DirichletParams params, std::vector<HistoryEntry> history)
      : prior_{prior}, params_{params}, history_{std::move(history)} {
    check_consistency();
  }

  [[nodiscard]] const DirichletParams& prior() const noexcept { return prior_; }
  [[nodiscard]] const DirichletParams& params() const noexcept { return params_; }
  [[nodiscard]] const std::vector<HistoryEntry>& history() const noexcept { return history_; }

  /// Applies one batch: the current posterior becomes the prior for these counts.
  void apply(std::string label, const Counts& counts) {
    params_ = update_posterior(params_, counts);
    history_.push_back({std::move(label), counts});
  }

  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;

 private:
  void check_consistency() const {
    Counts total;
    for (const auto& entry : history_) {
      total += entry.counts;
    }
    const auto expected = update_posterior(prior_, total);
    for (std::size_t i = 0; i < 3; ++i) {
      const double want = expected.values()[i];
      const double have = params_.values()[i];
      if (std::abs(want - have) > 1e-9 * std::max(1.0, std::abs(want))) {
        throw state_invariant_error("state alpha does not equal prior plus the sum of history counts");
      }
    }
  }

  DirichletParams prior_;
  DirichletParams params_;
  std::vector<HistoryEntry> history_;
};

inline nlohmann::ordered_json state_to_json(const PosteriorState& state) {
  auto history = nlohmann::ordered_json::array();
  for (const auto& entry : state.history()) {
    history.push_back(
        {{"label", entry.label}, {"counts", {entry.counts.x1, entry.counts.x2, entry.counts.x3}}});
  }
  return nlohmann::ordered_json{{"format_version", PosteriorState::kFormatVersion},
                                {"prior", state.prior().values()},
                                {"alpha", state.params().values()},
                                {"history", std::move(history)}};
}

inline PosteriorState state_from_json(const nlohmann::ordered_json& j) {
  std::vector<HistoryEntry> history;
  std::array<double, 3> prior{};
  std::array<double, 3> alpha{};
  try {
    if (j.at("format_version").get<int>() != PosteriorState::kFormatVersion) {
      throw data_error("unsupported state format_version");
    }
    prior = j.at("prior").get<std::array<double, 3>>();
    alpha = j.at("alpha").get<std::array<double, 3>>();
    for (const auto& entry : j.at("history")) {
      const auto counts = entry.at("counts").get<std::array<std::uint64_t, 3>>();
      history.push_back({entry.at("label").get<std::string>(), {counts[0], counts[1], counts[2]}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error(std::string("malformed state file: ") + e.what());
  }
  try {
    return PosteriorState{DirichletParams{prior}, DirichletParams{alpha}, std::move(history)};
  } catch (const config_error& e) {
    throw data_error(std::string("malformed state file: ") + e.what());
  }
}

inline std::string dump_state(const PosteriorState& state) { return state_to_json(state).dump(2) + "\n"; }

inline PosteriorState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw data_error("cannot open state file " + path.string());
  }
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw data_error(path.string() + ": malformed state file: " + e.what());
  }
  return state_from_json(j);
}

inline void save_state(const PosteriorState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw data_error("cannot write state file " + path.string());
  }
  out << dump_state(state);
  if (!out) {
    throw data_error("failed writing state file " + path.string());
  }
}

}  // namespace bnps

#endif  // BAYESNPS_INGEST_HPP
