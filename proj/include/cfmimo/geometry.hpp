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

#ifndef CFMIMO_GEOMETRY_HPP
#define CFMIMO_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cfmimo/rng.hpp"

namespace cfmimo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct AreaSpec {
  double side_length = 1000.0;  // meters
  bool wraparound = true;
  double ap_height = 12.5;  // meters
  double ue_height = 1.5;   // meters

  void validate() const;
};

struct ShadowModel {
  double sigma_db = 8.0;
  double delta = 0.5;
  double decorrelation_distance = 100.0;  // meters

  void validate() const;
};

// One random deployment with every large-scale quantity per AP-UE link.
// Matrices are M x K (row = AP, column = UE). Powers are linear (Watts
// relative to 1 W transmit, i.e. channel gains).
struct NetworkInstance {
  std::vector<Point> ap_positions;
  std::vector<Point> ue_positions;
  Eigen::MatrixXd distance;     // 3-D, meters
  Eigen::MatrixXd pathloss_db;  // without shadowing
  Eigen::MatrixXd kappa;
  Eigen::MatrixXd shadow_db;
  Eigen::MatrixXd los_mean;  // LoS amplitude, >= 0
  Eigen::MatrixXd nlos_var;  // NLoS variance, > 0

  std::size_t num_aps() const { return ap_positions.size(); }
  std::size_t num_ues() const { return ue_positions.size(); }
};

struct Positions {
  std::vector<Point> aps;
  std::vector<Point> ues;
};

Positions generate_positions(std::size_t num_aps, std::size_t num_ues,
                             const AreaSpec& area, Rng& rng);

// Planar distance on the torus (minimum over the 9 shifted copies) when
// wraparound is enabled, plain Euclidean otherwise.
double planar_distance(const Point& p, const Point& q, const AreaSpec& area);

// AP-UE distance including the antenna height gap.
double wraparound_distance(const Point& p, const Point& q,
                           const AreaSpec& area);

// Walfish-Ikegami micro-cell pathloss in dB, shadowing excluded.
double pathloss_db(double distance_m);

double rician_kappa(double distance_m);

// Correlated shadowing F(m,k) = sqrt(delta) a_m + sqrt(1 - delta) b_k with
// exponentially decaying (base 2) AP-AP and UE-UE covariances.
Eigen::MatrixXd sample_shadow_fading(const Positions& positions,
                                     const AreaSpec& area,
                                     const ShadowModel& model, Rng& rng);

struct LargeScale {
  Eigen::MatrixXd los_mean;
  Eigen::MatrixXd nlos_var;
};

// Splits total linear gain 10^(dB/10) into LoS power kappa/(kappa+1) and
// NLoS power 1/(kappa+1).
LargeScale large_scale_coefficients(const Eigen::MatrixXd& total_gain_db,
                                    const Eigen::MatrixXd& kappa);

// Full layout pipeline: positions, distances, pathloss, kappa, shadowing,
// LoS/NLoS split. Uses separate substreams of `seed` for layout and shadowing.
NetworkInstance generate_network(std::size_t num_aps, std::size_t num_ues,
                                 const AreaSpec& area,
                                 const ShadowModel& shadow,
                                 std::uint64_t seed);

// Builds an instance directly from given large-scale amplitudes/variances;
// used for hand-built scenarios. Positions are left at the origin.
NetworkInstance make_instance(const Eigen::MatrixXd& los_mean,
                              const Eigen::MatrixXd& nlos_var);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace cfmimo

#endif  // CFMIMO_GEOMETRY_HPP
