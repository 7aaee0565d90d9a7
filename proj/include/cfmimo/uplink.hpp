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

#ifndef CFMIMO_UPLINK_HPP
#define CFMIMO_UPLINK_HPP

#include <Eigen/Dense>
#include <vector>

#include "cfmimo/channel.hpp"

namespace cfmimo {

// Real symmetric matrix stored as diag(diagonal) + sum_i weight_i v_i v_i^T.
// All closed-form UL moment matrices have this shape.
struct DiagPlusRankOne {
  struct Term {
    double weight = 0.0;
    Eigen::VectorXd v;
  };

  Eigen::VectorXd diagonal;
  std::vector<Term> updates;

  Eigen::Index size() const { return diagonal.size(); }
  Eigen::MatrixXd dense() const;
  // a^H G a
  double quadratic(const Eigen::VectorXcd& a) const;
};

// UL moments of one UE for MR combining with a given estimator.
struct UeMoments {
  Eigen::VectorXd b;             // E{v_m,k^* h_m,k}
  Eigen::VectorXd noise_diag;    // E{|v_m,k|^2}
  DiagPlusRankOne gamma;         // assembled SINR denominator matrix
};

struct MomentSet {
  Estimator estimator = Estimator::kMmse;
  std::vector<UeMoments> ue;
};

MomentSet ul_moments_mmse(const EstimatorStatistics& stats,
                          const PowerConfig& powers,
                          const PilotAssignment& assign);
MomentSet ul_moments_lmmse(const EstimatorStatistics& stats,
                           const PowerConfig& powers,
                           const PilotAssignment& assign);
MomentSet ul_moments_ls(const EstimatorStatistics& stats,
                        const PowerConfig& powers,
                        const PilotAssignment& assign);
MomentSet ul_moments(Estimator e, const EstimatorStatistics& stats,
                     const PowerConfig& powers, const PilotAssignment& assign);

// Maximizer of p |a^H b|^2 / (a^H G a): a = G^{-1} b. G is equilibrated by
// its diagonal and factored with Cholesky; a pivoted LU is the fallback.
Eigen::VectorXcd optimal_lsfd(const Eigen::VectorXcd& b,
                              const Eigen::MatrixXcd& gamma);
Eigen::VectorXcd optimal_lsfd(const UeMoments& m);

double ul_sinr(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& gamma,
               const Eigen::VectorXcd& a, double data_power);
double ul_sinr(const UeMoments& m, const Eigen::VectorXcd& a,
               double data_power);

// p b^H G^{-1} b, the SINR at the optimal weights.
double ul_sinr_optimal(const UeMoments& m, double data_power);

// The printed trace-form SINR for combining weights A_k = diag(a); an
// independent algebraic route to ul_sinr on the assembled moments.
double ul_sinr_trace_form(Estimator e, const EstimatorStatistics& stats,
                          const PowerConfig& powers,
                          const PilotAssignment& assign, int k,
                          const Eigen::VectorXcd& a);

double ul_se(double sinr, const FrameConfig& frame);

}  // namespace cfmimo

#endif  // CFMIMO_UPLINK_HPP
