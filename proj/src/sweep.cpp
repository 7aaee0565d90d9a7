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

#include "cfmimo/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "cfmimo/downlink.hpp"
#include "cfmimo/error.hpp"
#include "cfmimo/parallel.hpp"
#include "cfmimo/uplink.hpp"

namespace cfmimo {

double round_sig12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

SetupInstance make_setup(const SimConfig& cfg, std::size_t setup) {
  Rng seeder = make_stream(cfg.master_seed, StreamPurpose::kInstance, {setup});
  SetupInstance inst;
  inst.net = generate_network(cfg.num_aps, cfg.num_ues, cfg.area, cfg.shadow,
                              seeder());
  Rng pilots = make_stream(cfg.master_seed, StreamPurpose::kPilots, {setup});
  inst.assign = assign_pilots(inst.net, cfg.tau_p, pilots);
  return inst;
}

std::vector<ResultRow> evaluate_setup(const SimConfig& cfg, std::size_t setup,
                                      const SetupInstance& inst) {
  const FrameConfig frame = cfg.frame();
  const PowerConfig powers = cfg.powers();
  const EstimatorStatistics stats =
      compute_statistics(inst.net, inst.assign, powers, frame);
  const auto num_ues = static_cast<Eigen::Index>(cfg.num_ues);
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(stats.num_aps());

  // sinr[e][s] for the requested estimators and schemes, in config order.
  std::vector<std::vector<Eigen::VectorXd>> sinr(cfg.estimators.size());
  for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
    const Estimator e = cfg.estimators[ei];
    const bool need_ul =
        std::any_of(cfg.schemes.begin(), cfg.schemes.end(), [](Scheme s) {
          return s == Scheme::kUlSingle || s == Scheme::kUlLsfd;
        });
    MomentSet moments;
    if (need_ul) moments = ul_moments(e, stats, powers, inst.assign);
    for (Scheme s : cfg.schemes) {
      Eigen::VectorXd v(num_ues);
      switch (s) {
        case Scheme::kUlSingle:
          for (Eigen::Index k = 0; k < num_ues; ++k) {
            v(k) = ul_sinr(moments.ue[static_cast<std::size_t>(k)], ones,
                           powers.ul_data_power(k));
          }
          break;
        case Scheme::kUlLsfd:
          for (Eigen::Index k = 0; k < num_ues; ++k) {
            v(k) = ul_sinr_optimal(moments.ue[static_cast<std::size_t>(k)],
                                   powers.ul_data_power(k));
          }
          break;
        case Scheme::kDlCoherent:
          v = dl_sinr_coherent(
              stats, dl_power_allocation(stats, powers, e, DlMode::kCoherent),
              inst.assign, powers.noise_dl);
          break;
        case Scheme::kDlNonCoherent:
          v = dl_sinr_noncoherent(
              stats,
              dl_power_allocation(stats, powers, e, DlMode::kNonCoherent),
              inst.assign, powers.noise_dl);
          break;
      }
      sinr[ei].push_back(std::move(v));
    }
  }

  std::vector<ResultRow> rows;
  rows.reserve(cfg.num_ues * cfg.estimators.size() * cfg.schemes.size());
  for (Eigen::Index k = 0; k < num_ues; ++k) {
    for (std::size_t ei = 0; ei < cfg.estimators.size(); ++ei) {
      for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
        const Scheme s = cfg.schemes[si];
        const double g = sinr[ei][si](k);
        const bool ul = s == Scheme::kUlSingle || s == Scheme::kUlLsfd;
        ResultRow r;
        r.setup = setup;
        r.ue = static_cast<int>(k);
        r.estimator = cfg.estimators[ei];
        r.scheme = s;
        r.sinr = round_sig12(g);
        r.se = round_sig12(ul ? ul_se(g, frame) : dl_se(g, frame));
        rows.push_back(r);
      }
    }
  }
  return rows;
}

namespace {

[[noreturn]] void rethrow_with_setup(std::size_t setup) {
  const std::string prefix = "setup " + std::to_string(setup) + ": ";
  try {
    throw;
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

std::vector<ValidationRow> validate_setup(const SimConfig& cfg,
                                          std::size_t setup,
                                          const SetupInstance& inst) {
  McConfig mc;
  mc.trials = cfg.mc_trials;
  mc.seed = cfg.master_seed;
  mc.tag = setup;
  mc.threads = 1;
  const std::vector<OracleCheck> checks = oracle_suite(
      inst.net, inst.assign, cfg.powers(), cfg.frame(), mc, 3.0);
  std::vector<ValidationRow> out;
  for (const OracleCheck& c : checks) {
    const bool est = std::find(cfg.estimators.begin(), cfg.estimators.end(),
                               c.estimator) != cfg.estimators.end();
    const bool sch =
        std::find(cfg.schemes.begin(), cfg.schemes.end(),
                  parse_scheme(c.scheme)) != cfg.schemes.end();
    if (est && sch) out.push_back({setup, c});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.check.ue < b.check.ue;
  });
  return out;
}

}  // namespace

ResultTable run_sweep(const SimConfig& cfg, unsigned threads) {
  cfg.validate();
  std::vector<std::vector<ResultRow>> rows(cfg.num_setups);
  std::vector<std::vector<ValidationRow>> checks(cfg.num_setups);
  parallel_for(cfg.num_setups, threads, [&](std::size_t s) {
    try {
      const SetupInstance inst = make_setup(cfg, s);
      rows[s] = evaluate_setup(cfg, s, inst);
      if (cfg.mc_trials > 0) checks[s] = validate_setup(cfg, s, inst);
    } catch (const Error&) {
      rethrow_with_setup(s);
    }
  });
  ResultTable table;
  for (std::size_t s = 0; s < cfg.num_setups; ++s) {
    table.rows.insert(table.rows.end(), rows[s].begin(), rows[s].end());
    table.validation.insert(table.validation.end(), checks[s].begin(),
                            checks[s].end());
  }
  return table;
}

void OracleSuiteConfig::validate() const {
  if (instances < 1) throw InvalidConfig("instances must be >= 1");
  if (num_aps < 1 || num_ues < 1) throw InvalidConfig("M and K must be >= 1");
  if (tau_p_cycle.empty()) throw InvalidConfig("tau_p cycle is empty");
  for (int t : tau_p_cycle) {
    if (t < 1) throw InvalidConfig("tau_p must be >= 1");
  }
  if (!(side_length_m > 0.0)) throw InvalidConfig("side length must be > 0");
  if (trials < 1000) throw InvalidConfig("trials must be >= 1000");
  if (!(z > 0.0)) throw InvalidConfig("z must be > 0");
}

std::vector<OracleSuiteInstance> run_oracle_suite(
    const OracleSuiteConfig& cfg) {
  cfg.validate();
  std::vector<OracleSuiteInstance> out;
  for (std::size_t i = 0; i < cfg.instances; ++i) {
    SimConfig sim;
    sim.num_aps = cfg.num_aps;
    sim.num_ues = cfg.num_ues;
    sim.tau_p = cfg.tau_p_cycle[i % cfg.tau_p_cycle.size()];
    sim.area.side_length = cfg.side_length_m;
    sim.master_seed = cfg.seed;
    const SetupInstance inst = make_setup(sim, i);
    McConfig mc;
    mc.trials = cfg.trials;
    mc.seed = cfg.seed;
    mc.tag = i;
    mc.threads = cfg.threads;
    OracleSuiteInstance r;
    r.index = i;
    r.tau_p = sim.tau_p;
    r.checks = oracle_suite(inst.net, inst.assign, sim.powers(), sim.frame(),
                            mc, cfg.z);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cfmimo
