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

#include "cfmimo/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "cfmimo/error.hpp"
#include "json.hpp"

namespace cfmimo {

namespace {

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("percentile of empty data");
  if (q <= 0.0) return sorted.front();
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

std::vector<SchemeSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<std::pair<Estimator, Scheme>> order;
  std::map<std::pair<Estimator, Scheme>, std::vector<double>> groups;
  for (const ResultRow& r : rows) {
    const auto key = std::make_pair(r.estimator, r.scheme);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(r.se);
  }
  std::vector<SchemeSummary> out;
  for (const auto& key : order) {
    std::vector<double>& se = groups[key];
    SchemeSummary s;
    s.estimator = key.first;
    s.scheme = key.second;
    s.samples = se.size();
    double sum = 0.0;
    for (double v : se) sum += v;
    s.mean_se = sum / static_cast<double>(se.size());
    std::sort(se.begin(), se.end());
    for (int q = 0; q <= 100; ++q) s.percentiles.push_back(nearest_rank(se, q));
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_rows_csv(const std::vector<ResultRow>& rows) {
  std::string out = kRowsHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    out += std::to_string(r.setup) + ',' + std::to_string(r.ue) + ',' +
           std::string(to_string(r.estimator)) + ',' +
           std::string(to_string(r.scheme)) + ',' + fmt12(r.sinr) + ',' +
           fmt12(r.se) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRowsHeader) {
    throw InvalidConfig("rows file: unexpected header");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) {
      throw InvalidConfig("rows file line " + std::to_string(line_no) +
                          ": expected 6 fields");
    }
    ResultRow r;
    r.setup = std::stoull(f[0]);
    r.ue = std::stoi(f[1]);
    r.estimator = parse_estimator(f[2]);
    r.scheme = parse_scheme(f[3]);
    r.sinr = std::strtod(f[4].c_str(), nullptr);
    r.se = std::strtod(f[5].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

EmittedFiles emit_results(const ResultTable& table, const SimConfig& cfg,
                          const std::filesystem::path& dir) {
  if (table.rows.empty()) throw InvalidConfig("result table is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  EmittedFiles files;
  files.rows = dir / "rows.csv";
  write_file(files.rows, format_rows_csv(table.rows));

  using nlohmann::ordered_json;
  ordered_json config = {
      {"M", cfg.num_aps},
      {"K", cfg.num_ues},
      {"tau_c", cfg.tau_c},
      {"tau_p", cfg.tau_p},
      {"ue_power_w", cfg.ue_power_w},
      {"dl_power_per_ue_w", cfg.dl_power_per_ue_w},
      {"noise_power_dbm", cfg.noise_power_dbm},
      {"bandwidth_hz", cfg.bandwidth_hz},
      {"num_setups", cfg.num_setups},
      {"mc_trials", cfg.mc_trials},
      {"master_seed", cfg.master_seed},
  };
  ordered_json schemes = ordered_json::array();
  for (const SchemeSummary& s : summarize(table.rows)) {
    ordered_json pct = ordered_json::array();
    ordered_json se = ordered_json::array();
    for (std::size_t q = 0; q < s.percentiles.size(); ++q) {
      pct.push_back(q);
      se.push_back(round_sig12(s.percentiles[q]));
    }
    schemes.push_back({{"estimator", to_string(s.estimator)},
                       {"scheme", to_string(s.scheme)},
                       {"samples", s.samples},
                       {"mean_se", round_sig12(s.mean_se)},
                       {"mean_throughput_bps",
                        round_sig12(s.mean_se * cfg.bandwidth_hz)},
                       // LSFD weights need the channel statistics that an LS
                       // receiver is assumed not to have.
                       {"requires_statistics",
                        s.estimator == Estimator::kLs &&
                            s.scheme == Scheme::kUlLsfd},
                       {"percent", pct},
                       {"se", se}});
  }
  ordered_json summary = {{"config", config}, {"results", schemes}};
  files.summary = dir / "summary.json";
  write_file(files.summary, summary.dump(2) + "\n");

  if (!table.validation.empty()) {
    std::string out =
        "setup,ue,estimator,scheme,closed_form,mc_value,std_error,"
        "jackknife_error,trials,z_score,pass\n";
    for (const ValidationRow& v : table.validation) {
      const ValidationReport& r = v.check.report;
      out += std::to_string(v.setup) + ',' + std::to_string(v.check.ue) + ',' +
             std::string(to_string(v.check.estimator)) + ',' + v.check.scheme +
             ',' + fmt12(r.closed_form) + ',' + fmt12(r.mc.value) + ',' +
             fmt12(r.mc.std_error) + ',' + fmt12(r.mc.jackknife_error) + ',' +
             std::to_string(r.mc.trials) + ',' + fmt12(r.z_score) + ',' +
             (r.pass ? "true" : "false") + '\n';
    }
    files.validation = dir / "validation.csv";
    write_file(files.validation, out);
  }
  return files;
}

}  // namespace cfmimo
