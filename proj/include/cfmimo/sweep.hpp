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

#ifndef CFMIMO_SWEEP_HPP
#define CFMIMO_SWEEP_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/montecarlo.hpp"

namespace cfmimo {

struct ResultRow {
  std::size_t setup = 0;
  int ue = 0;
  Estimator estimator = Estimator::kMmse;
  Scheme scheme = Scheme::kUlSingle;
  double sinr = 0.0;
  double se = 0.0;  // bit/s/Hz
};

struct ValidationRow {
  std::size_t setup = 0;
  OracleCheck check;
};

struct ResultTable {
  std::vector<ResultRow> rows;  // sorted by (setup, ue)
  std::vector<ValidationRow> validation;
};

// Rounds to the 12 significant digits used on output, so that emitted rows
// parse back to exactly the in-memory values.
double round_sig12(double x);

// Everything a setup needs, derived from (master_seed, setup index) only.
struct SetupInstance {
  NetworkInstance net;
  PilotAssignment assign;
};
SetupInstance make_setup(const SimConfig& cfg, std::size_t setup);

// Closed-form SE of every (UE, estimator, scheme) for one setup.
std::vector<ResultRow> evaluate_setup(const SimConfig& cfg, std::size_t setup,
                                      const SetupInstance& inst);

// Runs cfg.num_setups setups in parallel; output does not depend on threads.
ResultTable run_sweep(const SimConfig& cfg, unsigned threads = 0);

// Closed-form vs. Monte Carlo suite on small random instances. Instance i uses
// tau_p = tau_p_cycle[i % size] and its own layout/pilot substreams.
struct OracleSuiteConfig {
  std::size_t instances = 5;
  std::size_t num_aps = 3;
  std::size_t num_ues = 2;
  std::vector<int> tau_p_cycle{1, 2};
  double side_length_m = 300.0;
  std::size_t trials = 200000;
  std::uint64_t seed = 2019;
  double z = 3.0;
  unsigned threads = 0;

  void validate() const;
};

struct OracleSuiteInstance {
  std::size_t index = 0;
  int tau_p = 1;
  std::vector<OracleCheck> checks;
};

std::vector<OracleSuiteInstance> run_oracle_suite(const OracleSuiteConfig& cfg);

}  // namespace cfmimo

#endif  // CFMIMO_SWEEP_HPP
