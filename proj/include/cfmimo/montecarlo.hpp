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

#ifndef CFMIMO_MONTECARLO_HPP
#define CFMIMO_MONTECARLO_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/downlink.hpp"
#include "cfmimo/uplink.hpp"

namespace cfmimo {

struct McConfig {
  std::size_t trials = 200000;
  std::uint64_t seed = 1;
  std::uint64_t tag = 0;  // separates oracle runs sharing a seed
  int batches = 20;
  unsigned threads = 0;

  void validate(std::size_t min_trials = 1) const;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;        // delta method on per-trial statistics
  double jackknife_error = 0.0;  // leave-one-batch-out
  std::size_t trials = 0;
};

// Empirical UL moments of one estimator. For each UE k (all M-vectors /
// M x M matrices, complex):
//   b[k]      = E{v_k^* h_k}           (per AP)
//   interf[k] = sum_l p_l E{(v_k^* h_l)(v_k^* h_l)^H}
//   noise[k]  = E{|v_k|^2}
// Per-batch sums are kept for jackknife errors.
struct EmpiricalMoments {
  Estimator estimator = Estimator::kMmse;
  std::size_t trials = 0;
  Eigen::VectorXd data_power;
  double noise = 0.0;
  std::vector<Eigen::VectorXcd> b;
  std::vector<Eigen::MatrixXcd> interf;
  std::vector<Eigen::VectorXd> noise_diag;
  // batch_*[batch][k]: sums over the batch's trials.
  std::vector<std::size_t> batch_trials;
  std::vector<std::vector<Eigen::VectorXcd>> batch_b;
  std::vector<std::vector<Eigen::MatrixXcd>> batch_interf;
  std::vector<std::vector<Eigen::VectorXd>> batch_noise;

  // Denominator matrix interf - p_k b b^H + sigma^2 diag(noise).
  Eigen::MatrixXcd gamma(int k) const;
};

EmpiricalMoments mc_ul_moments(const NetworkInstance& net,
                               const PilotAssignment& assign,
                               const PowerConfig& powers,
                               const FrameConfig& frame, Estimator e,
                               const McConfig& cfg);

// Quotient p |a^H b|^2 / (a^H G a) on the empirical moments; std_error and
// jackknife_error are both the batch jackknife here.
McEstimate mc_ul_sinr(const EmpiricalMoments& moments, int k,
                      const Eigen::VectorXcd& a, double data_power);

// Streaming UL SINR of every UE at fixed combining weights a[k].
std::vector<McEstimate> mc_ul_sinr_direct(
    const NetworkInstance& net, const PilotAssignment& assign,
    const PowerConfig& powers, const FrameConfig& frame, Estimator e,
    const std::vector<Eigen::VectorXcd>& weights, const McConfig& cfg);

// Streaming DL SINR of every UE; precoders follow dl_power_allocation.
std::vector<McEstimate> mc_dl_sinr(const NetworkInstance& net,
                                   const PilotAssignment& assign,
                                   const PowerConfig& powers,
                                   const FrameConfig& frame, DlMode mode,
                                   Estimator e, const McConfig& cfg);

// Empirical E{|h - h-hat|^2} per link.
struct MseEstimate {
  Eigen::MatrixXd value;
  Eigen::MatrixXd std_error;
};
MseEstimate mc_estimator_mse(const NetworkInstance& net,
                             const PilotAssignment& assign,
                             const PowerConfig& powers,
                             const FrameConfig& frame, Estimator e,
                             const McConfig& cfg);

struct ValidationReport {
  bool pass = false;
  double closed_form = 0.0;
  McEstimate mc;
  double z_score = 0.0;  // |closed - mc| / std_error
};

// pass iff |closed - mc.value| <= z * mc.std_error. A zero std_error only
// passes an agreement to rounding.
ValidationReport validate(double closed_form, const McEstimate& mc, double z);

// One closed form against its oracle.
struct OracleCheck {
  Estimator estimator = Estimator::kMmse;
  std::string scheme;  // ul_single, ul_lsfd, dl_coherent, dl_noncoherent
  int ue = 0;
  ValidationReport report;
};

// All closed-form SINRs of an instance against one shared set of sampled
// blocks: UL single-layer and optimal LSFD (at the closed-form weights),
// coherent and non-coherent DL, for every estimator.
std::vector<OracleCheck> oracle_suite(const NetworkInstance& net,
                                      const PilotAssignment& assign,
                                      const PowerConfig& powers,
                                      const FrameConfig& frame,
                                      const McConfig& cfg, double z);

}  // namespace cfmimo

#endif  // CFMIMO_MONTECARLO_HPP
