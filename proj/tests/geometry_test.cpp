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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfmimo/error.hpp"
#include "cfmimo/geometry.hpp"

namespace cfmimo {
namespace {

TEST(GeneratePositions, DegenerateSquarePutsEverythingAtOrigin) {
  AreaSpec area;
  area.side_length = 0.0;
  Rng rng(7);
  const Positions pos = generate_positions(1, 1, area, rng);
  EXPECT_EQ(pos.aps[0].x, 0.0);
  EXPECT_EQ(pos.aps[0].y, 0.0);
  EXPECT_EQ(pos.ues[0].x, 0.0);
  EXPECT_EQ(pos.ues[0].y, 0.0);
}

TEST(GeneratePositions, SameSeedSameLayout) {
  AreaSpec area;
  Rng a(42), b(42);
  const Positions p = generate_positions(20, 10, area, a);
  const Positions q = generate_positions(20, 10, area, b);
  for (std::size_t i = 0; i < p.aps.size(); ++i) {
    EXPECT_EQ(p.aps[i].x, q.aps[i].x);
    EXPECT_EQ(p.aps[i].y, q.aps[i].y);
  }
  for (std::size_t i = 0; i < p.ues.size(); ++i) {
    EXPECT_EQ(p.ues[i].x, q.ues[i].x);
    EXPECT_EQ(p.ues[i].y, q.ues[i].y);
  }
}

TEST(GeneratePositions, MeanCoordinateIsCentre) {
  AreaSpec area;
  Rng rng(3);
  const Positions pos = generate_positions(10000, 1, area, rng);
  double sx = 0.0, sy = 0.0;
  for (const Point& p : pos.aps) {
    sx += p.x;
    sy += p.y;
    ASSERT_GE(p.x, 0.0);
    ASSERT_LT(p.x, 1000.0);
  }
  EXPECT_NEAR(sx / 1e4, 500.0, 10.0);
  EXPECT_NEAR(sy / 1e4, 500.0, 10.0);
}

TEST(GeneratePositions, RejectsZeroCounts) {
  Rng rng(1);
  EXPECT_THROW(generate_positions(0, 3, AreaSpec{}, rng), InvalidConfig);
  EXPECT_THROW(generate_positions(3, 0, AreaSpec{}, rng), InvalidConfig);
}

TEST(WraparoundDistance, CoincidentPointsGiveHeightGap) {
  const AreaSpec area;
  EXPECT_DOUBLE_EQ(wraparound_distance({10, 20}, {10, 20}, area), 11.0);
}

TEST(WraparoundDistance, WrapsAcrossTheEdge) {
  AreaSpec area;
  area.ap_height = area.ue_height = 1.5;
  EXPECT_NEAR(wraparound_distance({0, 0}, {999, 0}, area), 1.0, 1e-12);
}

TEST(WraparoundDistance, MatchesBruteForceOverShifts) {
  const AreaSpec area;
  const double expected = std::sqrt(500.0 * 500.0 + 11.0 * 11.0);
  EXPECT_NEAR(wraparound_distance({0, 0}, {400, 300}, area), expected, 1e-9);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int t = 0; t < 1000; ++t) {
    const Point p{u(gen), u(gen)};
    const Point q{u(gen), u(gen)};
    double best = INFINITY;
    for (int sx = -1; sx <= 1; ++sx) {
      for (int sy = -1; sy <= 1; ++sy) {
        const double dx = p.x - q.x + 1000.0 * sx;
        const double dy = p.y - q.y + 1000.0 * sy;
        best = std::min(best, std::hypot(dx, dy));
      }
    }
    ASSERT_NEAR(wraparound_distance(p, q, area), std::hypot(best, 11.0), 1e-9);
  }
}

TEST(WraparoundDistance, WithoutWrapIsEuclidean) {
  AreaSpec area;
  area.wraparound = false;
  area.ap_height = area.ue_height = 0.0;
  EXPECT_NEAR(wraparound_distance({0, 0}, {999, 0}, area), 999.0, 1e-12);
}

TEST(PlanarDistance, IsATorusMetric) {
  const AreaSpec area;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int t = 0; t < 2000; ++t) {
    const Point a{u(gen), u(gen)}, b{u(gen), u(gen)}, c{u(gen), u(gen)};
    const double ab = planar_distance(a, b, area);
    ASSERT_DOUBLE_EQ(ab, planar_distance(b, a, area));
    ASSERT_EQ(planar_distance(a, a, area), 0.0);
    ASSERT_LE(ab, planar_distance(a, c, area) + planar_distance(c, b, area) +
                      1e-9);
    ASSERT_LE(ab, std::sqrt(2.0) * 500.0 + 1e-9);
    ASSERT_DOUBLE_EQ(wraparound_distance(a, b, area),
                     wraparound_distance(b, a, area));
  }
}

TEST(Pathloss, ReferenceValues) {
  EXPECT_NEAR(pathloss_db(1.0), -30.18, 1e-12);
  EXPECT_NEAR(pathloss_db(10.0), -56.18, 1e-12);
  EXPECT_NEAR(pathloss_db(433.0), -30.18 - 26.0 * std::log10(433.0), 1e-12);
  EXPECT_THROW(pathloss_db(0.0), DomainError);
  EXPECT_THROW(pathloss_db(-3.0), DomainError);
}

TEST(RicianKappa, ReferenceValues) {
  EXPECT_NEAR(rician_kappa(1300.0 / 3.0), 1.0, 1e-12);
  EXPECT_NEAR(rician_kappa(100.0), 10.0, 1e-12);
  EXPECT_NEAR(rician_kappa(250.0), std::pow(10.0, 0.55), 1e-12);
}

TEST(LargeScale, SplitsTotalGain) {
  Eigen::MatrixXd db(1, 3), kappa(1, 3);
  db << -40.0, -50.0, -80.0;
  kappa << 0.0, 1.0, 10.0;
  const LargeScale ls = large_scale_coefficients(db, kappa);
  EXPECT_EQ(ls.los_mean(0, 0), 0.0);
  EXPECT_NEAR(ls.nlos_var(0, 0), 1e-4, 1e-18);
  EXPECT_NEAR(ls.los_mean(0, 1) * ls.los_mean(0, 1), 0.5e-5, 1e-18);
  EXPECT_NEAR(ls.nlos_var(0, 1), 0.5e-5, 1e-18);
  EXPECT_NEAR(ls.los_mean(0, 2) * ls.los_mean(0, 2), 1e-8 * 10.0 / 11.0, 1e-22);
  EXPECT_NEAR(ls.nlos_var(0, 2), 1e-8 / 11.0, 1e-22);
}

TEST(ShadowFading, ApCovarianceHalvesAtDecorrelationDistance) {
  Positions pos;
  pos.aps = {{0, 0}, {100, 0}};
  pos.ues = {{500, 500}};
  ShadowModel model;
  model.delta = 1.0;
  Rng rng(9);
  const int n = 40000;
  double s1 = 0, s2 = 0, s12 = 0;
  for (int t = 0; t < n; ++t) {
    const Eigen::MatrixXd f = sample_shadow_fading(pos, AreaSpec{}, model, rng);
    s1 += f(0, 0);
    s2 += f(1, 0);
    s12 += f(0, 0) * f(1, 0);
  }
  const double cov = s12 / n - (s1 / n) * (s2 / n);
  // sd of the sample covariance ~ 64 sqrt(1.25 / n)
  EXPECT_NEAR(cov, 0.5 * 64.0, 4.0 * 64.0 * std::sqrt(1.25 / n));
}

TEST(ShadowFading, ZeroDeltaDependsOnlyOnUe) {
  Rng layout(2);
  const Positions pos = generate_positions(6, 4, AreaSpec{}, layout);
  ShadowModel model;
  model.delta = 0.0;
  Rng rng(4);
  const Eigen::MatrixXd f = sample_shadow_fading(pos, AreaSpec{}, model, rng);
  for (Eigen::Index k = 0; k < f.cols(); ++k) {
    for (Eigen::Index m = 1; m < f.rows(); ++m) {
      EXPECT_EQ(f(m, k), f(0, k));
    }
  }
}

TEST(ShadowFading, MarginalVarianceAndUeCrossCovariance) {
  Positions pos;
  pos.aps = {{0, 0}};
  pos.ues = {{300, 300}, {400, 300}};
  const ShadowModel model;  // sigma 8, delta 0.5
  Rng rng(21);
  const int n = 100000;
  double s0 = 0, s1 = 0, q0 = 0, s01 = 0;
  for (int t = 0; t < n; ++t) {
    const Eigen::MatrixXd f = sample_shadow_fading(pos, AreaSpec{}, model, rng);
    s0 += f(0, 0);
    s1 += f(0, 1);
    q0 += f(0, 0) * f(0, 0);
    s01 += f(0, 0) * f(0, 1);
  }
  const double var = q0 / n - (s0 / n) * (s0 / n);
  EXPECT_NEAR(var / 64.0, 1.0, 0.05);
  const double cov = s01 / n - (s0 / n) * (s1 / n);
  // Shared AP term contributes delta sigma^2, UE terms (1 - delta) sigma^2 / 2.
  EXPECT_NEAR(cov, 0.5 * 64.0 + 0.5 * 64.0 * 0.5, 1.5);
}

TEST(ShadowFading, CoincidentPointsStillFactor) {
  Positions pos;
  pos.aps = {{10, 10}, {10, 10}, {10, 10}};
  pos.ues = {{20, 20}, {20, 20}};
  Rng rng(1);
  EXPECT_NO_THROW(sample_shadow_fading(pos, AreaSpec{}, ShadowModel{}, rng));
}

TEST(GenerateNetwork, TotalGainMatchesPathlossPlusShadowing) {
  const NetworkInstance net =
      generate_network(30, 12, AreaSpec{}, ShadowModel{}, 99);
  for (Eigen::Index m = 0; m < 30; ++m) {
    for (Eigen::Index k = 0; k < 12; ++k) {
      const double total = net.los_mean(m, k) * net.los_mean(m, k) +
                           net.nlos_var(m, k);
      const double expected =
          db_to_linear(net.pathloss_db(m, k) + net.shadow_db(m, k));
      ASSERT_NEAR(total / expected, 1.0, 1e-12);
      ASSERT_NEAR(net.kappa(m, k), rician_kappa(net.distance(m, k)), 1e-12);
      ASSERT_NEAR(net.pathloss_db(m, k), pathloss_db(net.distance(m, k)), 1e-12);
      ASSERT_GE(net.distance(m, k), 11.0);
    }
  }
}

TEST(GenerateNetwork, Deterministic) {
  const NetworkInstance a = generate_network(8, 5, AreaSpec{}, ShadowModel{}, 5);
  const NetworkInstance b = generate_network(8, 5, AreaSpec{}, ShadowModel{}, 5);
  const NetworkInstance c = generate_network(8, 5, AreaSpec{}, ShadowModel{}, 6);
  EXPECT_TRUE(a.los_mean == b.los_mean);
  EXPECT_TRUE(a.nlos_var == b.nlos_var);
  EXPECT_TRUE(a.shadow_db == b.shadow_db);
  EXPECT_FALSE(a.los_mean == c.los_mean);
}

TEST(Units, Conversions) {
  EXPECT_NEAR(dbm_to_watt(-94.0), std::pow(10.0, -12.4), 1e-25);
  EXPECT_NEAR(db_to_linear(linear_to_db(3.7)), 3.7, 1e-14);
}

}  // namespace
}  // namespace cfmimo
