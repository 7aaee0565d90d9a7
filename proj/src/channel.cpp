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

#include "cfmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cfmimo/error.hpp"

namespace cfmimo {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::kMmse:
      return "mmse";
    case Estimator::kLmmse:
      return "lmmse";
    case Estimator::kLs:
      return "ls";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "mmse") return Estimator::kMmse;
  if (name == "lmmse") return Estimator::kLmmse;
  if (name == "ls") return Estimator::kLs;
  throw InvalidConfig("unknown estimator '" + std::string(name) + "'");
}

FrameConfig FrameConfig::dedicated(int tau_c, int tau_p) {
  FrameConfig f{tau_c, tau_p, tau_c - tau_p, tau_c - tau_p};
  f.validate();
  return f;
}

void FrameConfig::validate() const {
  if (tau_p < 1) throw InvalidConfig("tau_p must be >= 1");
  if (tau_c <= tau_p) throw InvalidConfig("tau_c must exceed tau_p");
  const int data = tau_c - tau_p;
  if (tau_u != data && tau_u != 0) {
    throw InvalidConfig("tau_u must be tau_c - tau_p or 0");
  }
  if (tau_d != data && tau_d != 0) {
    throw InvalidConfig("tau_d must be tau_c - tau_p or 0");
  }
}

PowerConfig PowerConfig::uniform(std::size_t num_ues, double ue_power,
                                 double per_ue_dl_power, double noise) {
  PowerConfig p;
  const auto k = static_cast<Eigen::Index>(num_ues);
  p.pilot_power = Eigen::VectorXd::Constant(k, ue_power);
  p.ul_data_power = Eigen::VectorXd::Constant(k, ue_power);
  p.dl_total_power = per_ue_dl_power * static_cast<double>(num_ues);
  p.noise_ul = noise;
  p.noise_dl = noise;
  return p;
}

void PowerConfig::validate(std::size_t num_ues) const {
  const auto k = static_cast<Eigen::Index>(num_ues);
  if (pilot_power.size() != k || ul_data_power.size() != k) {
    throw InvalidConfig("per-UE power vectors must have length K");
  }
  if ((pilot_power.array() < 0.0).any() ||
      (ul_data_power.array() < 0.0).any() || dl_total_power < 0.0) {
    throw InvalidConfig("powers must be >= 0");
  }
  if (noise_ul < 0.0 || noise_dl < 0.0) {
    throw InvalidConfig("noise powers must be >= 0");
  }
}

PilotAssignment make_assignment(std::vector<int> pilot_of_ue, int tau_p) {
  if (tau_p < 1) throw InvalidConfig("tau_p must be >= 1");
  PilotAssignment a;
  a.tau_p = tau_p;
  a.pilot_of_ue = std::move(pilot_of_ue);
  std::vector<std::vector<int>> holders(static_cast<std::size_t>(tau_p));
  for (std::size_t k = 0; k < a.pilot_of_ue.size(); ++k) {
    const int t = a.pilot_of_ue[k];
    if (t < 0 || t >= tau_p) throw InvalidConfig("pilot index out of range");
    holders[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
  }
  a.cohort.resize(a.pilot_of_ue.size());
  for (std::size_t k = 0; k < a.pilot_of_ue.size(); ++k) {
    a.cohort[k] = holders[static_cast<std::size_t>(a.pilot_of_ue[k])];
  }
  return a;
}

PilotAssignment assign_pilots(const NetworkInstance& net, int tau_p,
                              Rng& rng) {
  const std::size_t num_ues = net.num_ues();
  if (tau_p < 1) throw InvalidConfig("tau_p must be >= 1");
  if (num_ues == 0) throw InvalidConfig("need at least one UE");

  std::vector<int> perm(static_cast<std::size_t>(tau_p));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  const Eigen::MatrixXd beta_prime =
      net.nlos_var.array() + net.los_mean.array().square();
  std::vector<int> pilot(num_ues, -1);
  const std::size_t seeded = std::min<std::size_t>(num_ues, perm.size());
  for (std::size_t k = 0; k < seeded; ++k) pilot[k] = perm[k];

  for (std::size_t k = seeded; k < num_ues; ++k) {
    Eigen::VectorXd score = Eigen::VectorXd::Zero(tau_p);
    const auto col = beta_prime.col(static_cast<Eigen::Index>(k));
    for (std::size_t l = 0; l < k; ++l) {
      score(pilot[l]) += col.dot(beta_prime.col(static_cast<Eigen::Index>(l)));
    }
    Eigen::Index best = 0;
    score.minCoeff(&best);
    pilot[k] = static_cast<int>(best);
  }
  return make_assignment(std::move(pilot), tau_p);
}

ChannelRealization sample_channel(const NetworkInstance& net, Rng& rng) {
  const Eigen::Index m = net.los_mean.rows();
  const Eigen::Index k = net.los_mean.cols();
  std::uniform_real_distribution<double> angle(-std::numbers::pi,
                                               std::numbers::pi);
  ComplexNormal cn;
  ChannelRealization r;
  r.phase.resize(m, k);
  r.nlos.resize(m, k);
  r.h.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double phi = angle(rng);
      const std::complex<double> g = cn(rng, net.nlos_var(i, j));
      r.phase(i, j) = phi;
      r.nlos(i, j) = g;
      r.h(i, j) = std::polar(net.los_mean(i, j), phi) + g;
    }
  }
  return r;
}

void receive_pilots(ChannelRealization& real, const PilotAssignment& assign,
                    const PowerConfig& powers, const FrameConfig& frame,
                    Rng& rng) {
  const Eigen::Index m = real.h.rows();
  const Eigen::Index k = real.h.cols();
  const double tau = frame.tau_p;
  ComplexNormal cn;
  // Despread observation per pilot, then copied to every UE on that pilot.
  Eigen::MatrixXcd per_pilot(m, assign.tau_p);
  for (int t = 0; t < assign.tau_p; ++t) {
    for (Eigen::Index i = 0; i < m; ++i) {
      per_pilot(i, t) = cn(rng, powers.noise_ul * tau);
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    const int t = assign.pilot_of_ue[static_cast<std::size_t>(j)];
    per_pilot.col(t) += std::sqrt(powers.pilot_power(j)) * tau * real.h.col(j);
  }
  real.pilot_obs.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    real.pilot_obs.col(j) =
        per_pilot.col(assign.pilot_of_ue[static_cast<std::size_t>(j)]);
  }
}

Eigen::MatrixXd EstimatorStatistics::ls_error() const {
  Eigen::MatrixXd out(beta.rows(), beta.cols());
  for (Eigen::Index k = 0; k < beta.cols(); ++k) {
    out.col(k) = residual_prime.col(k) / (pilot_power(k) * tau_p);
  }
  return out;
}

Eigen::MatrixXd EstimatorStatistics::estimate_power(Estimator e) const {
  Eigen::MatrixXd out(beta.rows(), beta.cols());
  for (Eigen::Index k = 0; k < beta.cols(); ++k) {
    const double pt = pilot_power(k) * tau_p;
    switch (e) {
      case Estimator::kMmse:
        out.col(k) = z.col(k);
        break;
      case Estimator::kLmmse:
        out.col(k) = pt * omega_prime.col(k);
        break;
      case Estimator::kLs:
        out.col(k) = lambda_prime.col(k) / pt;
        break;
    }
  }
  return out;
}

EstimatorStatistics compute_statistics(const NetworkInstance& net,
                                       const PilotAssignment& assign,
                                       const PowerConfig& powers,
                                       const FrameConfig& frame) {
  const Eigen::Index m = net.los_mean.rows();
  const Eigen::Index k = net.los_mean.cols();
  if (static_cast<Eigen::Index>(assign.num_ues()) != k) {
    throw InvalidConfig("pilot assignment does not match the UE count");
  }
  if (assign.tau_p != frame.tau_p) {
    throw InvalidConfig("pilot assignment and frame disagree on tau_p");
  }
  powers.validate(static_cast<std::size_t>(k));

  EstimatorStatistics s;
  s.tau_p = frame.tau_p;
  s.pilot_power = powers.pilot_power;
  s.beta = net.nlos_var;
  s.los_mean = net.los_mean;
  s.los_power = net.los_mean.array().square();
  s.beta_prime = s.beta + s.los_power;

  const double tau = frame.tau_p;
  s.lambda.resize(m, k);
  s.lambda_prime.resize(m, k);
  s.residual.resize(m, k);
  s.residual_prime.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd res = Eigen::VectorXd::Constant(m, powers.noise_ul);
    Eigen::VectorXd res_p = res;
    for (int l : assign.cohort[static_cast<std::size_t>(j)]) {
      if (l == j) continue;
      res += powers.pilot_power(l) * tau * s.beta.col(l);
      res_p += powers.pilot_power(l) * tau * s.beta_prime.col(l);
    }
    const double pt = powers.pilot_power(j) * tau;
    s.residual.col(j) = res;
    s.residual_prime.col(j) = res_p;
    s.lambda.col(j) = res + pt * s.beta.col(j);
    s.lambda_prime.col(j) = res_p + pt * s.beta_prime.col(j);
  }

  s.omega.resize(m, k);
  s.omega_prime.resize(m, k);
  s.c.resize(m, k);
  s.c_prime.resize(m, k);
  s.z.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double pt = powers.pilot_power(j) * tau;
    const auto beta = s.beta.col(j).array();
    const auto beta_p = s.beta_prime.col(j).array();
    // A link with zero variance and zero noise has 0/0 here; its estimate
    // carries no random part, so the ratio is taken as 0.
    s.omega.col(j) = (s.lambda.col(j).array() > 0.0)
                         .select(beta.square() / s.lambda.col(j).array(), 0.0);
    s.omega_prime.col(j) =
        (s.lambda_prime.col(j).array() > 0.0)
            .select(beta_p.square() / s.lambda_prime.col(j).array(), 0.0);
    // beta - p tau beta^2 / lambda without the cancellation of the raw form.
    s.c.col(j) = (s.lambda.col(j).array() > 0.0)
                     .select(beta * s.residual.col(j).array() /
                                 s.lambda.col(j).array(),
                             0.0);
    s.c_prime.col(j) = (s.lambda_prime.col(j).array() > 0.0)
                           .select(beta_p * s.residual_prime.col(j).array() /
                                       s.lambda_prime.col(j).array(),
                                   0.0);
    s.z.col(j) = pt * s.omega.col(j) + s.los_power.col(j);
  }
  return s;
}

Eigen::MatrixXcd estimate_mmse(const ChannelRealization& real,
                               const EstimatorStatistics& stats,
                               const PilotAssignment& assign,
                               const PowerConfig& powers) {
  const Eigen::Index m = real.h.rows();
  const Eigen::Index k = real.h.cols();
  const double tau = stats.tau_p;
  Eigen::MatrixXcd los(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      los(i, j) = std::polar(stats.los_mean(i, j), real.phase(i, j));
    }
  }
  Eigen::MatrixXcd out(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXcd mean_obs = Eigen::VectorXcd::Zero(m);
    for (int l : assign.cohort[static_cast<std::size_t>(j)]) {
      mean_obs += std::sqrt(powers.pilot_power(l)) * tau * los.col(l);
    }
    const double sp = std::sqrt(powers.pilot_power(j));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lam = stats.lambda(i, j);
      const double gain = lam > 0.0 ? sp * stats.beta(i, j) / lam : 0.0;
      out(i, j) = los(i, j) + gain * (real.pilot_obs(i, j) - mean_obs(i));
    }
  }
  return out;
}

Eigen::MatrixXcd estimate_lmmse(const ChannelRealization& real,
                                const EstimatorStatistics& stats,
                                const PowerConfig& powers) {
  const Eigen::Index m = real.h.rows();
  const Eigen::Index k = real.h.cols();
  Eigen::MatrixXcd out(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double sp = std::sqrt(powers.pilot_power(j));
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lam = stats.lambda_prime(i, j);
      const double gain = lam > 0.0 ? sp * stats.beta_prime(i, j) / lam : 0.0;
      out(i, j) = gain * real.pilot_obs(i, j);
    }
  }
  return out;
}

Eigen::MatrixXcd estimate_ls(const ChannelRealization& real,
                             const PowerConfig& powers,
                             const FrameConfig& frame) {
  Eigen::MatrixXcd out(real.pilot_obs.rows(), real.pilot_obs.cols());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = real.pilot_obs.col(j) /
                 (std::sqrt(powers.pilot_power(j)) * frame.tau_p);
  }
  return out;
}

Eigen::MatrixXcd estimate(Estimator e, const ChannelRealization& real,
                          const EstimatorStatistics& stats,
                          const PilotAssignment& assign,
                          const PowerConfig& powers, const FrameConfig& frame) {
  switch (e) {
    case Estimator::kMmse:
      return estimate_mmse(real, stats, assign, powers);
    case Estimator::kLmmse:
      return estimate_lmmse(real, stats, powers);
    case Estimator::kLs:
      return estimate_ls(real, powers, frame);
  }
  throw InvalidConfig("unknown estimator");
}

}  // namespace cfmimo
