// Copyright 2026 The cfmimo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CFMIMO_RESULTS_HPP
#define CFMIMO_RESULTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cfmimo/sweep.hpp"

namespace cfmimo {

inline constexpr const char* kRowsHeader =
    "setup,ue,estimator,scheme,sinr,se_bit_per_hz";

struct SchemeSummary {
  Estimator estimator = Estimator::kMmse;
  Scheme scheme = Scheme::kUlSingle;
  std::size_t samples = 0;
  double mean_se = 0.0;
  std::vector<double> percentiles;  // SE at 0%, 1%, ..., 100% (nearest rank)
};

// One entry per (estimator, scheme) present in the table, in row order of
// first appearance.
std::vector<SchemeSummary> summarize(const std::vector<ResultRow>& rows);

// Nearest-rank percentile of sorted data, q in [0, 100].
double nearest_rank(const std::vector<double>& sorted, double q);

struct EmittedFiles {
  std::filesystem::path rows;
  std::filesystem::path summary;
  std::filesystem::path validation;  // empty unless validation rows exist
};

// Writes rows.csv, summary.json and (with Monte Carlo) validation.csv into
// dir, creating it if needed.
EmittedFiles emit_results(const ResultTable& table, const SimConfig& cfg,
                          const std::filesystem::path& dir);

std::string format_rows_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_rows_csv(const std::string& text);

}  // namespace cfmimo

#endif  // CFMIMO_RESULTS_HPP
