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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any of them fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/downlink.hpp"
#include "cfmimo/montecarlo.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/sweep.hpp"
#include "cfmimo/uplink.hpp"

namespace fs = std::filesystem;
using namespace cfmimo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// --- full-scale sweeps, shared by several criteria ------------------------

constexpr std::size_t kSetups = 100;

SimConfig full_scale_config(int tau_p, std::size_t num_ues) {
  SimConfig cfg;
  cfg.num_aps = 100;
  cfg.num_ues = num_ues;
  cfg.tau_p = tau_p;
  cfg.num_setups = kSetups;
  cfg.master_seed = 2019;
  return cfg;
}

struct Sweep {
  SimConfig cfg;
  ResultTable table;
  // mean SE per (estimator, scheme)
  std::map<std::pair<Estimator, Scheme>, double> mean;
};

Sweep run_full_sweep(int tau_p, std::size_t num_ues) {
  Sweep s;
  s.cfg = full_scale_config(tau_p, num_ues);
  s.table = run_sweep(s.cfg);
  std::map<std::pair<Estimator, Scheme>, std::pair<double, std::size_t>> acc;
  for (const ResultRow& r : s.table.rows) {
    auto& a = acc[{r.estimator, r.scheme}];
    a.first += r.se;
    ++a.second;
  }
  for (const auto& [key, a] : acc) s.mean[key] = a.first / double(a.second);
  return s;
}

// Relative loss of MMSE over LMMSE for one scheme, in percent.
double loss_pct(const Sweep& s, Scheme scheme) {
  const double mmse = s.mean.at({Estimator::kMmse, scheme});
  const double lmmse = s.mean.at({Estimator::kLmmse, scheme});
  return 100.0 * (mmse - lmmse) / mmse;
}

double loss_pct_alt(const Sweep& s, Scheme scheme) {
  const double mmse = s.mean.at({Estimator::kMmse, scheme});
  const double lmmse = s.mean.at({Estimator::kLmmse, scheme});
  return 100.0 * (mmse - lmmse) / lmmse;
}

// --- criteria ---------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  OracleSuiteConfig cfg;  // 5 instances, M=3, K=2, tau_p in {1,2}, 2e5 trials
  const auto suite = run_oracle_suite(cfg);
  const double elapsed = seconds_since(t0);
  std::size_t total = 0, failed = 0;
  double worst = 0.0;
  for (const auto& inst : suite) {
    for (const OracleCheck& c : inst.checks) {
      ++total;
      worst = std::max(worst, c.report.z_score);
      if (!c.report.pass) {
        ++failed;
        std::printf("  instance %zu tau_p=%d %s/%s ue %d: closed %.6g mc %.6g "
                    "z %.2f\n",
                    inst.index, inst.tau_p,
                    std::string(to_string(c.estimator)).c_str(),
                    c.scheme.c_str(), c.ue, c.report.closed_form,
                    c.report.mc.value, c.report.z_score);
      }
    }
  }
  const bool pass = failed == 0 && total > 0 && elapsed < 600.0;
  return {pass, fmt("%zu/%zu within %.0f SE over %zu instances, max z %.2f, "
                    "%.1f s",
                    total - failed, total, cfg.z, suite.size(), worst, elapsed)};
}

Outcome lsfd_gain(const Sweep& s) {
  std::map<std::tuple<std::size_t, int, Estimator>, double> single;
  for (const ResultRow& r : s.table.rows)
    if (r.scheme == Scheme::kUlSingle) single[{r.setup, r.ue, r.estimator}] = r.se;
  std::size_t n = 0, bad = 0;
  double min_gain = INFINITY;
  for (const ResultRow& r : s.table.rows) {
    if (r.scheme != Scheme::kUlLsfd) continue;
    const double g = r.se - single.at({r.setup, r.ue, r.estimator});
    min_gain = std::min(min_gain, g);
    ++n;
    if (g < 0.0) ++bad;
  }
  return {bad == 0 && n > 0,
          fmt("%zu/%zu UE-estimator pairs with LSFD >= single over %zu setups, "
              "min gain %.3g bit/s/Hz",
              n - bad, n, s.cfg.num_setups, min_gain)};
}

// Unrounded per-UE SEs straight from the library.
struct LibraryCheck {
  double ul_lsfd = 0.0;     // max rel. err LMMSE vs LS, UL optimal LSFD
  double dl_noncoh = 0.0;   // max rel. err LMMSE vs LS, DL non-coherent
  std::size_t ues = 0;
  std::size_t instances = 0;
  std::size_t stat_violations = 0;
  std::size_t stat_links = 0;
};

void check_statistics(const EstimatorStatistics& st, LibraryCheck& out) {
  const Eigen::MatrixXd ls = st.ls_error();
  for (Eigen::Index m = 0; m < st.num_aps(); ++m)
    for (Eigen::Index k = 0; k < st.num_ues(); ++k) {
      ++out.stat_links;
      if (!(st.c(m, k) <= st.c_prime(m, k) && st.c_prime(m, k) <= ls(m, k)))
        ++out.stat_violations;
    }
  ++out.instances;
}

void library_pass(const SimConfig& cfg, LibraryCheck& out) {
  const FrameConfig frame = cfg.frame();
  const PowerConfig powers = cfg.powers();
  for (std::size_t s = 0; s < cfg.num_setups; ++s) {
    const SetupInstance inst = make_setup(cfg, s);
    const EstimatorStatistics st =
        compute_statistics(inst.net, inst.assign, powers, frame);
    check_statistics(st, out);

    const MomentSet ml = ul_moments(Estimator::kLmmse, st, powers, inst.assign);
    const MomentSet mls = ul_moments(Estimator::kLs, st, powers, inst.assign);
    const auto al = dl_power_allocation(st, powers, Estimator::kLmmse,
                                        DlMode::kNonCoherent);
    const auto als = dl_power_allocation(st, powers, Estimator::kLs,
                                         DlMode::kNonCoherent);
    const Eigen::VectorXd gl =
        dl_sinr_noncoherent(st, al, inst.assign, powers.noise_dl);
    const Eigen::VectorXd gls =
        dl_sinr_noncoherent(st, als, inst.assign, powers.noise_dl);
    for (std::size_t k = 0; k < cfg.num_ues; ++k) {
      const double p = powers.ul_data_power(Eigen::Index(k));
      out.ul_lsfd = std::max(
          out.ul_lsfd, rel_err(ul_se(ul_sinr_optimal(ml.ue[k], p), frame),
                               ul_se(ul_sinr_optimal(mls.ue[k], p), frame)));
      out.dl_noncoh = std::max(
          out.dl_noncoh, rel_err(dl_se(gl(Eigen::Index(k)), frame),
                                 dl_se(gls(Eigen::Index(k)), frame)));
      ++out.ues;
    }
  }
}

Outcome ul_lmmse_equals_ls(const LibraryCheck& c) {
  return {c.ul_lsfd < 1e-10,
          fmt("max relative error %.3g over %zu UEs (tau_p 5 and 20)",
              c.ul_lsfd, c.ues)};
}

Outcome dl_lmmse_equals_ls(const LibraryCheck& c) {
  return {c.dl_noncoh < 1e-12,
          fmt("max relative error %.3g over %zu UEs (tau_p 5 and 20)",
              c.dl_noncoh, c.ues)};
}

bool within(double value, double target) {
  return std::abs(value - target) <= 5.0;
}

Outcome ul_phase_loss(const Sweep& s5, const Sweep& s20) {
  const double l5 = loss_pct(s5, Scheme::kUlLsfd);
  const double l20 = loss_pct(s20, Scheme::kUlLsfd);
  return {within(l5, 24.8) && within(l20, 6.9),
          fmt("loss %.1f%% at tau_p=5 (target 24.8), %.1f%% at tau_p=20 "
              "(target 6.9); relative to LMMSE: %.1f%%, %.1f%%",
              l5, l20, loss_pct_alt(s5, Scheme::kUlLsfd),
              loss_pct_alt(s20, Scheme::kUlLsfd))};
}

Outcome dl_phase_loss(const Sweep& s5, const Sweep& s20) {
  const double c5 = loss_pct(s5, Scheme::kDlCoherent);
  const double c20 = loss_pct(s20, Scheme::kDlCoherent);
  const double n5 = loss_pct(s5, Scheme::kDlNonCoherent);
  const double n20 = loss_pct(s20, Scheme::kDlNonCoherent);
  const bool pass = within(c5, 42.6) && within(c20, 13.4) &&
                    within(n5, 10.9) && within(n20, 2.4);
  return {pass,
          fmt("coherent %.1f%%/%.1f%% (targets 42.6/13.4), non-coherent "
              "%.1f%%/%.1f%% (targets 10.9/2.4) at tau_p=5/20; relative to "
              "LMMSE: coherent %.1f%%/%.1f%%, non-coherent %.1f%%/%.1f%%",
              c5, c20, n5, n20, loss_pct_alt(s5, Scheme::kDlCoherent),
              loss_pct_alt(s20, Scheme::kDlCoherent),
              loss_pct_alt(s5, Scheme::kDlNonCoherent),
              loss_pct_alt(s20, Scheme::kDlNonCoherent))};
}

Outcome orderings(const Sweep& k40, const Sweep& k10) {
  bool pass = true;
  std::ostringstream os;
  for (Estimator e : {Estimator::kMmse, Estimator::kLmmse}) {
    const double coh = k40.mean.at({e, Scheme::kDlCoherent});
    const double non = k40.mean.at({e, Scheme::kDlNonCoherent});
    pass = pass && coh > non;
    os << to_string(e) << " coherent " << fmt("%.3f", coh) << " vs "
       << fmt("%.3f", non) << "; ";
  }
  std::size_t ok = 0, total = 0;
  for (const auto& [key, m40] : k40.mean) {
    ++total;
    if (k10.mean.at(key) > m40) {
      ++ok;
    } else {
      pass = false;
      os << to_string(key.first) << "/" << to_string(key.second)
         << " K=10 not above K=40; ";
    }
  }
  os << ok << "/" << total << " estimator/scheme means larger at K=10";
  return {pass, os.str()};
}

Outcome estimator_statistics(const LibraryCheck& lib) {
  // Small instance with two UEs on one pilot, so contamination is present.
  SimConfig cfg;
  cfg.num_aps = 2;
  cfg.num_ues = 2;
  cfg.tau_p = 1;
  cfg.area.side_length = 300.0;
  cfg.master_seed = 7;
  const SetupInstance inst = make_setup(cfg, 0);
  const FrameConfig frame = cfg.frame();
  const PowerConfig powers = cfg.powers();
  const EstimatorStatistics st =
      compute_statistics(inst.net, inst.assign, powers, frame);
  LibraryCheck small = lib;
  check_statistics(st, small);

  McConfig mc;
  mc.trials = 1000000;
  mc.seed = 2019;
  const std::pair<Estimator, Eigen::MatrixXd> expected[] = {
      {Estimator::kMmse, st.c},
      {Estimator::kLmmse, st.c_prime},
      {Estimator::kLs, st.ls_error()}};
  double worst = 0.0;
  bool mse_ok = true;
  for (const auto& [e, want] : expected) {
    const MseEstimate got =
        mc_estimator_mse(inst.net, inst.assign, powers, frame, e, mc);
    for (Eigen::Index i = 0; i < want.size(); ++i) {
      const double z = std::abs(got.value(i) - want(i)) / got.std_error(i);
      worst = std::max(worst, z);
      mse_ok = mse_ok && z <= 3.0;
    }
  }
  return {small.stat_violations == 0 && mse_ok,
          fmt("ordering holds on %zu/%zu links of %zu instances; empirical MSE "
              "max z %.2f at 1e6 draws",
              small.stat_links - small.stat_violations, small.stat_links,
              small.instances, worst)};
}

Outcome telescoping() {
  Rng rng = make_stream(2019, StreamPurpose::kInstance, {999});
  std::uniform_real_distribution<double> u(0.01, 10.0);
  std::uniform_int_distribution<int> n_aps(1, 100);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    SicTerms terms;
    terms.signal.resize(n_aps(rng));
    for (auto& s : terms.signal) s = u(rng);
    terms.received_total = terms.signal.sum() * (1.0 + u(rng));
    terms.noise = u(rng) * 1e-3;
    worst = std::max(worst, dl_sic_telescoping_check(terms));
  }
  return {worst < 1e-10, fmt("max residual %.3g over 1000 inputs", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome thread_determinism() {
  const fs::path dir = fs::temp_directory_path() / "cfmimo_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg")
      << "M = 30\nK = 8\ntau_p = 3\nnum_setups = 12\nmc_trials = 2000\n"
         "master_seed = 11\n";
  std::vector<std::string> names;
  for (const char* threads : {"1", "4", "8"}) {
    const fs::path out = dir / (std::string("t") + threads);
    const std::string cmd = std::string(CFMIMO_CLI_PATH) + " run " +
                            (dir / "run.cfg").string() + " --threads " +
                            threads + " --out " + out.string() + " > " +
                            (dir / "log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
      return {false, "run failed: " + slurp(dir / "log")};
    names.push_back(out.string());
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(names.front())) {
    const std::string ref = slurp(entry.path());
    for (std::size_t i = 1; i < names.size(); ++i) {
      const fs::path other = fs::path(names[i]) / entry.path().filename();
      if (!fs::exists(other) || slurp(other) != ref)
        return {false, entry.path().filename().string() + " differs"};
    }
    ++files;
  }
  return {files >= 3,
          fmt("%zu output files identical with 1, 4 and 8 threads", files)};
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  report(1, "closed-form vs Monte Carlo", oracle_equivalence);

  const Sweep s5 = run_full_sweep(5, 40);
  const Sweep s20 = run_full_sweep(20, 40);
  const Sweep k10 = run_full_sweep(5, 10);
  LibraryCheck lib;
  library_pass(s5.cfg, lib);
  library_pass(s20.cfg, lib);

  report(2, "LSFD gain", [&] { return lsfd_gain(s5); });
  report(3, "UL LMMSE == LS under LSFD", [&] { return ul_lmmse_equals_ls(lib); });
  report(4, "DL non-coherent LMMSE == LS",
         [&] { return dl_lmmse_equals_ls(lib); });
  report(5, "UL phase-knowledge loss", [&] { return ul_phase_loss(s5, s20); });
  report(6, "DL phase-knowledge loss", [&] { return dl_phase_loss(s5, s20); });
  report(7, "SE orderings", [&] { return orderings(s5, k10); });
  report(8, "estimator statistics", [&] { return estimator_statistics(lib); });
  report(9, "SIC telescoping identity", telescoping);
  report(10, "thread-count determinism", thread_determinism);

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
