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

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/results.hpp"
#include "cfmimo/sweep.hpp"

namespace {

using namespace cfmimo;

void print_summary(const std::string& label, const ResultTable& table) {
  for (const SchemeSummary& s : summarize(table.rows)) {
    std::printf("%-16s %-6s %-15s mean_se=%.6f  median=%.6f  p5=%.6f\n",
                label.c_str(), std::string(to_string(s.estimator)).c_str(),
                std::string(to_string(s.scheme)).c_str(), s.mean_se,
                s.percentiles[50], s.percentiles[5]);
  }
}

int validation_failures(const ResultTable& table) {
  int failed = 0;
  for (const ValidationRow& v : table.validation) {
    if (!v.check.report.pass) ++failed;
  }
  return failed;
}

struct RunArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t setups = 0;
  std::size_t trials = 0;
  std::string out;
  unsigned threads = 0;
};

int cmd_run(const RunArgs& a, const CLI::App& sub) {
  SimConfig cfg = load_config(a.config);
  if (sub.count("--seed")) cfg.master_seed = a.seed;
  if (sub.count("--setups")) cfg.num_setups = a.setups;
  if (sub.count("--trials")) cfg.mc_trials = a.trials;
  if (sub.count("--out")) cfg.output = a.out;
  cfg.validate();
  const ResultTable table = run_sweep(cfg, a.threads);
  const EmittedFiles files = emit_results(table, cfg, cfg.output);
  print_summary("run", table);
  std::printf("wrote %s and %s\n", files.rows.string().c_str(),
              files.summary.string().c_str());
  if (!table.validation.empty()) {
    const int failed = validation_failures(table);
    std::printf("oracle checks: %zu, failed: %d (%s)\n",
                table.validation.size(), failed,
                files.validation.string().c_str());
  }
  return 0;
}

int cmd_validate(const OracleSuiteConfig& cfg) {
  const auto results = run_oracle_suite(cfg);
  std::size_t total = 0;
  std::size_t failed = 0;
  for (const auto& inst : results) {
    std::size_t inst_failed = 0;
    for (const OracleCheck& c : inst.checks) {
      ++total;
      const ValidationReport& r = c.report;
      if (!r.pass) {
        ++inst_failed;
        std::printf(
            "FAIL instance %zu tau_p=%d %s %s ue %d: closed=%.9g mc=%.9g "
            "se=%.3g z=%.2f\n",
            inst.index, inst.tau_p, std::string(to_string(c.estimator)).c_str(),
            c.scheme.c_str(), c.ue, r.closed_form, r.mc.value, r.mc.std_error,
            r.z_score);
      }
    }
    failed += inst_failed;
    std::printf("instance %zu (M=%zu K=%zu tau_p=%d): %zu checks, %zu failed\n",
                inst.index, cfg.num_aps, cfg.num_ues, inst.tau_p,
                inst.checks.size(), inst_failed);
  }
  std::printf("%s: %zu/%zu closed forms within %.2f standard errors\n",
              failed == 0 ? "PASS" : "FAIL", total - failed, total, cfg.z);
  return failed == 0 ? 0 : 1;
}

struct Variant {
  std::string label;
  SimConfig cfg;
};

std::vector<Variant> preset(const std::string& name) {
  std::vector<Variant> out;
  const std::vector<std::size_t> ap_counts{20, 40, 60, 80, 100};
  auto base = [] {
    SimConfig c;
    c.num_aps = 100;
    c.num_ues = 40;
    c.tau_p = 5;
    return c;
  };
  if (name == "fig1" || name == "fig5") {
    for (std::size_t m : ap_counts) {
      SimConfig c = base();
      c.num_aps = m;
      c.schemes = name == "fig1"
                      ? std::vector<Scheme>{Scheme::kUlSingle, Scheme::kUlLsfd}
                      : std::vector<Scheme>{Scheme::kDlCoherent,
                                            Scheme::kDlNonCoherent};
      out.push_back({"M" + std::to_string(m), c});
    }
  } else if (name == "fig3" || name == "fig7") {
    for (int t : {5, 20}) {
      SimConfig c = base();
      c.tau_p = t;
      c.schemes = name == "fig3" ? std::vector<Scheme>{Scheme::kUlLsfd}
                                 : std::vector<Scheme>{Scheme::kDlCoherent};
      out.push_back({"tau_p" + std::to_string(t), c});
    }
  } else {
    throw InvalidConfig("unknown preset '" + name +
                        "' (expected fig1, fig3, fig5 or fig7)");
  }
  return out;
}

struct ReproduceArgs {
  std::string name;
  std::size_t setups = 100;
  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string out = "reproduce";
  unsigned threads = 0;
};

int cmd_reproduce(const ReproduceArgs& a) {
  int failed = 0;
  for (Variant& v : preset(a.name)) {
    v.cfg.num_setups = a.setups;
    v.cfg.mc_trials = a.trials;
    v.cfg.master_seed = a.seed;
    v.cfg.output = (std::filesystem::path(a.out) / a.name / v.label).string();
    v.cfg.validate();
    const ResultTable table = run_sweep(v.cfg, a.threads);
    emit_results(table, v.cfg, v.cfg.output);
    print_summary(a.name + "/" + v.label, table);
    failed += validation_failures(table);
  }
  std::printf("results under %s\n",
              (std::filesystem::path(a.out) / a.name).string().c_str());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO spectral-efficiency simulator"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a multi-setup sweep");
  run_cmd->add_option("config", run.config, "Config file")->required();
  run_cmd->add_option("--seed", run.seed, "Master seed override");
  run_cmd->add_option("--setups", run.setups, "Number of setups override");
  run_cmd->add_option("--trials", run.trials,
                      "Monte Carlo trials per setup (0 = closed form only)");
  run_cmd->add_option("--out", run.out, "Output directory override");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0 = all)");

  OracleSuiteConfig val;
  auto* val_cmd = app.add_subcommand(
      "validate", "Closed forms vs. Monte Carlo on small random instances");
  val_cmd->add_option("--z", val.z, "Pass threshold in standard errors")
      ->capture_default_str();
  val_cmd->add_option("--trials", val.trials, "Trials per instance")
      ->capture_default_str();
  val_cmd->add_option("--instances", val.instances, "Number of instances")
      ->capture_default_str();
  val_cmd->add_option("--seed", val.seed, "Seed")->capture_default_str();
  val_cmd->add_option("-M,--aps", val.num_aps, "APs per instance (<= 5)")
      ->capture_default_str();
  val_cmd->add_option("-K,--ues", val.num_ues, "UEs per instance (<= 4)")
      ->capture_default_str();
  val_cmd->add_option("--threads", val.threads, "Worker threads (0 = all)");

  ReproduceArgs rep;
  auto* rep_cmd =
      app.add_subcommand("reproduce", "Preset sweeps: fig1, fig3, fig5, fig7");
  rep_cmd->add_option("preset", rep.name, "Preset name")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig3", "fig5", "fig7"}));
  rep_cmd->add_option("--setups", rep.setups, "Setups per variant")
      ->capture_default_str();
  rep_cmd->add_option("--trials", rep.trials, "Monte Carlo trials per setup")
      ->capture_default_str();
  rep_cmd->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  rep_cmd->add_option("--out", rep.out, "Output root")->capture_default_str();
  rep_cmd->add_option("--threads", rep.threads, "Worker threads (0 = all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd);
    if (*val_cmd) return cmd_validate(val);
    if (*rep_cmd) return cmd_reproduce(rep);
  } catch (const cfmimo::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
