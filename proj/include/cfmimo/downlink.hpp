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

#ifndef CFMIMO_DOWNLINK_HPP
#define CFMIMO_DOWNLINK_HPP

#include <Eigen/Dense>
#include <string_view>

#include "cfmimo/channel.hpp"

namespace cfmimo {

enum class DlMode { kCoherent, kNonCoherent };

std::string_view to_string(DlMode mode);

// Channel-quality proportional DL power: rho(m,k) = (rho_dl / K) eta(m,k),
// eta(m,k) = beta'(m,k) / sum_l beta'(m,l).
struct DLPowerAllocation {
  Estimator estimator = Estimator::kMmse;
  DlMode mode = DlMode::kCoherent;
  Eigen::MatrixXd rho;
  Eigen::MatrixXd eta;
  Eigen::MatrixXd estimate_power;  // E{|h-hat|^2}, the precoder normalizer
  Eigen::MatrixXd d;               // coherent: rho / E{|h-hat|^2}; else rho
};

DLPowerAllocation dl_power_allocation(const EstimatorStatistics& stats,
                                      const PowerConfig& powers, Estimator e,
                                      DlMode mode);

// Closed-form UatF SINR per UE for MR precoding w_k = D_k^{1/2} h-hat_k.
Eigen::VectorXd dl_sinr_coherent(const EstimatorStatistics& stats,
                                 const DLPowerAllocation& alloc,
                                 const PilotAssignment& assign,
                                 double noise_dl);

// Aggregate SIC SINR per UE for per-AP independent symbols.
Eigen::VectorXd dl_sinr_noncoherent(const EstimatorStatistics& stats,
                                    const DLPowerAllocation& alloc,
                                    const PilotAssignment& assign,
                                    double noise_dl);

// Per-AP ingredients of the non-coherent SINR of one UE.
struct SicTerms {
  Eigen::VectorXd signal;     // rho(n,k) |E{h^*(n,k) w(n,k)}|^2
  double received_total = 0;  // sum_n sum_l rho(n,l) E{|h^*(n,k) w(n,l)|^2}
  double noise = 0;
};

SicTerms dl_noncoherent_terms(const EstimatorStatistics& stats,
                              const DLPowerAllocation& alloc,
                              const PilotAssignment& assign, int k,
                              double noise_dl);

// |sum_m log2(1 + gamma_m) - log2((T + s2) / (T - sum S + s2))| for the
// successive per-AP SINRs gamma_m of a SIC receiver.
double dl_sic_telescoping_check(const SicTerms& terms);

double dl_se(double sinr, const FrameConfig& frame);

}  // namespace cfmimo

#endif  // CFMIMO_DOWNLINK_HPP
