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

#ifndef CFMIMO_CHANNEL_HPP
#define CFMIMO_CHANNEL_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <string_view>
#include <vector>

#include "cfmimo/geometry.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

enum class Estimator { kMmse, kLmmse, kLs };

inline constexpr Estimator kAllEstimators[] = {Estimator::kMmse,
                                               Estimator::kLmmse,
                                               Estimator::kLs};

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct FrameConfig {
  int tau_c = 200;
  int tau_p = 5;
  int tau_u = 195;
  int tau_d = 195;

  // UL-only or DL-only blocks: both data lengths are tau_c - tau_p.
  static FrameConfig dedicated(int tau_c, int tau_p);
  void validate() const;
};

struct PowerConfig {
  Eigen::VectorXd pilot_power;    // per UE, Watts
  Eigen::VectorXd ul_data_power;  // per UE, Watts
  double dl_total_power = 0.0;    // per AP, Watts
  double noise_ul = 0.0;          // Watts
  double noise_dl = 0.0;          // Watts

  // Same pilot/data power for every UE, DL budget = K * per_ue_dl.
  static PowerConfig uniform(std::size_t num_ues, double ue_power,
                             double per_ue_dl_power, double noise);
  void validate(std::size_t num_ues) const;
};

struct PilotAssignment {
  int tau_p = 1;
  std::vector<int> pilot_of_ue;
  std::vector<std::vector<int>> cohort;  // cohort[k] = UEs sharing k's pilot

  bool shares_pilot(int k, int l) const {
    return pilot_of_ue[static_cast<std::size_t>(k)] ==
           pilot_of_ue[static_cast<std::size_t>(l)];
  }
  std::size_t num_ues() const { return pilot_of_ue.size(); }
};

// Builds cohorts from an explicit pilot index per UE.
PilotAssignment make_assignment(std::vector<int> pilot_of_ue, int tau_p);

// First min(tau_p, K) UEs get distinct random pilots; every later UE picks
// the pilot whose current holders overlap least with it in large-scale gain.
PilotAssignment assign_pilots(const NetworkInstance& net, int tau_p, Rng& rng);

struct ChannelRealization {
  Eigen::MatrixXcd h;
  Eigen::MatrixXd phase;
  Eigen::MatrixXcd nlos;
  Eigen::MatrixXcd pilot_obs;  // despread y^p per AP per UE
};

// h = los_mean * exp(j phase) + nlos, phase ~ U[-pi, pi), nlos ~ CN(0, beta).
ChannelRealization sample_channel(const NetworkInstance& net, Rng& rng);

// Fills real.pilot_obs. One noise draw CN(0, sigma^2 tau_p) per (AP, pilot).
void receive_pilots(ChannelRealization& real, const PilotAssignment& assign,
                    const PowerConfig& powers, const FrameConfig& frame,
                    Rng& rng);

// Per-link estimation constants. Every matrix is M x K; column k holds the
// diagonal of the corresponding per-UE M x M aggregate.
struct EstimatorStatistics {
  int tau_p = 1;
  Eigen::VectorXd pilot_power;
  Eigen::MatrixXd beta;          // R
  Eigen::MatrixXd los_mean;      // h-bar
  Eigen::MatrixXd los_power;     // L = h-bar^2
  Eigen::MatrixXd beta_prime;    // R' = beta + h-bar^2
  Eigen::MatrixXd lambda;        // sum_{l in P_k} p_l tau_p beta_l + sigma^2
  Eigen::MatrixXd lambda_prime;  // same with beta'
  Eigen::MatrixXd residual;        // lambda - p_k tau_p beta_k, summed directly
  Eigen::MatrixXd residual_prime;  // lambda' - p_k tau_p beta'_k
  Eigen::MatrixXd c;             // MMSE error variance
  Eigen::MatrixXd c_prime;       // LMMSE error variance
  Eigen::MatrixXd omega;         // beta^2 / lambda
  Eigen::MatrixXd omega_prime;   // beta'^2 / lambda'
  Eigen::MatrixXd z;             // p_k tau_p omega + L

  Eigen::Index num_aps() const { return beta.rows(); }
  Eigen::Index num_ues() const { return beta.cols(); }

  // LS error variance lambda' / (p tau_p) - beta'.
  Eigen::MatrixXd ls_error() const;
  // E{|h-hat|^2} per link for the given estimator.
  Eigen::MatrixXd estimate_power(Estimator e) const;
};

EstimatorStatistics compute_statistics(const NetworkInstance& net,
                                       const PilotAssignment& assign,
                                       const PowerConfig& powers,
                                       const FrameConfig& frame);

Eigen::MatrixXcd estimate_mmse(const ChannelRealization& real,
                               const EstimatorStatistics& stats,
                               const PilotAssignment& assign,
                               const PowerConfig& powers);

Eigen::MatrixXcd estimate_lmmse(const ChannelRealization& real,
                                const EstimatorStatistics& stats,
                                const PowerConfig& powers);

Eigen::MatrixXcd estimate_ls(const ChannelRealization& real,
                             const PowerConfig& powers,
                             const FrameConfig& frame);

Eigen::MatrixXcd estimate(Estimator e, const ChannelRealization& real,
                          const EstimatorStatistics& stats,
                          const PilotAssignment& assign,
                          const PowerConfig& powers, const FrameConfig& frame);

}  // namespace cfmimo

#endif  // CFMIMO_CHANNEL_HPP
