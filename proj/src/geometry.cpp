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

#include "cfmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfmimo/error.hpp"

namespace cfmimo {

void AreaSpec::validate() const {
  // A zero-side square is a legal degenerate layout (all nodes at the origin).
  if (!(side_length >= 0.0) || !std::isfinite(side_length)) {
    throw InvalidConfig("area side_length must be a finite value >= 0");
  }
  if (!(ap_height >= 0.0) || !(ue_height >= 0.0)) {
    throw InvalidConfig("antenna heights must be >= 0");
  }
}

void ShadowModel::validate() const {
  if (!(sigma_db >= 0.0)) throw InvalidConfig("shadow sigma_db must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidConfig("shadow delta must lie in [0, 1]");
  }
  if (!(decorrelation_distance > 0.0)) {
    throw InvalidConfig("shadow decorrelation distance must be > 0");
  }
}

Positions generate_positions(std::size_t num_aps, std::size_t num_ues,
                             const AreaSpec& area, Rng& rng) {
  if (num_aps == 0 || num_ues == 0) {
    throw InvalidConfig("need at least one AP and one UE");
  }
  area.validate();
  std::uniform_real_distribution<double> coord(0.0, area.side_length);
  Positions out;
  out.aps.resize(num_aps);
  out.ues.resize(num_ues);
  for (auto& p : out.aps) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  for (auto& p : out.ues) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  return out;
}

double planar_distance(const Point& p, const Point& q, const AreaSpec& area) {
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  if (!area.wraparound || area.side_length <= 0.0) {
    return std::hypot(dx, dy);
  }
  const double side = area.side_length;
  double best = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; ++sx) {
    for (int sy = -1; sy <= 1; ++sy) {
      best = std::min(best, std::hypot(dx + sx * side, dy + sy * side));
    }
  }
  return best;
}

double wraparound_distance(const Point& p, const Point& q,
                           const AreaSpec& area) {
  return std::hypot(planar_distance(p, q, area),
                    area.ap_height - area.ue_height);
}

double pathloss_db(double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("pathloss requires a positive distance");
  }
  return -30.18 - 26.0 * std::log10(distance_m);
}

double rician_kappa(double distance_m) {
  if (!(distance_m > 0.0)) {
    throw DomainError("kappa requires a positive distance");
  }
  return std::pow(10.0, 1.3 - 0.003 * distance_m);
}

namespace {

// Lower Cholesky factor of sigma^2 * [2^(-d_ij/d_dc)], regularized.
Eigen::MatrixXd shadow_factor(const std::vector<Point>& pts,
                              const AreaSpec& area, const ShadowModel& model,
                              const char* what) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  const double var = model.sigma_db * model.sigma_db;
  if (var == 0.0) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d = planar_distance(pts[i], pts[j], area);
      cov(i, j) = cov(j, i) =
          var * std::exp2(-d / model.decorrelation_distance);
    }
  }
  cov.diagonal().array() += 1e-10 * var;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "shadow-fading covariance factorization failed for " << what
        << " (n=" << n << ", sigma_db=" << model.sigma_db << ")";
    throw NumericalError(msg.str());
  }
  return llt.matrixL();
}

Eigen::VectorXd standard_normal_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace

Eigen::MatrixXd sample_shadow_fading(const Positions& positions,
                                     const AreaSpec& area,
                                     const ShadowModel& model, Rng& rng) {
  model.validate();
  const auto m = static_cast<Eigen::Index>(positions.aps.size());
  const auto k = static_cast<Eigen::Index>(positions.ues.size());
  const Eigen::MatrixXd ap_factor =
      shadow_factor(positions.aps, area, model, "APs");
  const Eigen::MatrixXd ue_factor =
      shadow_factor(positions.ues, area, model, "UEs");
  const Eigen::VectorXd a = ap_factor * standard_normal_vector(m, rng);
  const Eigen::VectorXd b = ue_factor * standard_normal_vector(k, rng);
  const double wa = std::sqrt(model.delta);
  const double wb = std::sqrt(1.0 - model.delta);
  Eigen::MatrixXd f(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    f.col(j) = wa * a.array() + wb * b(j);
  }
  return f;
}

LargeScale large_scale_coefficients(const Eigen::MatrixXd& total_gain_db,
                                    const Eigen::MatrixXd& kappa) {
  if (total_gain_db.rows() != kappa.rows() ||
      total_gain_db.cols() != kappa.cols()) {
    throw InvalidConfig("gain and kappa matrices differ in shape");
  }
  if ((kappa.array() < 0.0).any()) {
    throw DomainError("kappa must be >= 0");
  }
  const Eigen::ArrayXXd gain =
      total_gain_db.array().unaryExpr([](double db) { return db_to_linear(db); });
  const Eigen::ArrayXXd k = kappa.array();
  LargeScale out;
  out.los_mean = (gain * k / (k + 1.0)).sqrt().matrix();
  out.nlos_var = (gain / (k + 1.0)).matrix();
  return out;
}

NetworkInstance generate_network(std::size_t num_aps, std::size_t num_ues,
                                 const AreaSpec& area,
                                 const ShadowModel& shadow,
                                 std::uint64_t seed) {
  area.validate();
  shadow.validate();
  Rng layout_rng = make_stream(seed, StreamPurpose::kLayout);
  Rng shadow_rng = make_stream(seed, StreamPurpose::kShadowing);

  Positions pos = generate_positions(num_aps, num_ues, area, layout_rng);
  const auto m = static_cast<Eigen::Index>(num_aps);
  const auto k = static_cast<Eigen::Index>(num_ues);

  NetworkInstance net;
  net.distance.resize(m, k);
  net.pathloss_db.resize(m, k);
  net.kappa.resize(m, k);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = wraparound_distance(pos.aps[i], pos.ues[j], area);
      net.distance(i, j) = d;
      net.pathloss_db(i, j) = pathloss_db(d);
      net.kappa(i, j) = rician_kappa(d);
    }
  }
  net.shadow_db = sample_shadow_fading(pos, area, shadow, shadow_rng);
  LargeScale ls =
      large_scale_coefficients(net.pathloss_db + net.shadow_db, net.kappa);
  net.los_mean = std::move(ls.los_mean);
  net.nlos_var = std::move(ls.nlos_var);
  net.ap_positions = std::move(pos.aps);
  net.ue_positions = std::move(pos.ues);
  return net;
}

NetworkInstance make_instance(const Eigen::MatrixXd& los_mean,
                              const Eigen::MatrixXd& nlos_var) {
  if (los_mean.rows() != nlos_var.rows() ||
      los_mean.cols() != nlos_var.cols()) {
    throw InvalidConfig("los_mean and nlos_var differ in shape");
  }
  if (los_mean.size() == 0) throw InvalidConfig("empty instance");
  if ((los_mean.array() < 0.0).any() || (nlos_var.array() < 0.0).any()) {
    throw InvalidConfig("large-scale coefficients must be >= 0");
  }
  NetworkInstance net;
  net.ap_positions.resize(static_cast<std::size_t>(los_mean.rows()));
  net.ue_positions.resize(static_cast<std::size_t>(los_mean.cols()));
  const Eigen::ArrayXXd total = los_mean.array().square() + nlos_var.array();
  net.distance = Eigen::MatrixXd::Zero(los_mean.rows(), los_mean.cols());
  net.pathloss_db = total.unaryExpr([](double g) { return linear_to_db(g); });
  net.kappa = (los_mean.array().square() / nlos_var.array()).matrix();
  net.shadow_db = Eigen::MatrixXd::Zero(los_mean.rows(), los_mean.cols());
  net.los_mean = los_mean;
  net.nlos_var = nlos_var;
  return net;
}

}  // namespace cfmimo
