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

#include "cfmimo/uplink.hpp"

#include <cmath>
#include <complex>

#include "cfmimo/error.hpp"

namespace cfmimo {

Eigen::MatrixXd DiagPlusRankOne::dense() const {
  Eigen::MatrixXd g = diagonal.asDiagonal();
  for (const auto& t : updates) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(t.v, t.weight);
  }
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

double DiagPlusRankOne::quadratic(const Eigen::VectorXcd& a) const {
  double q = (a.cwiseAbs2().array() * diagonal.array()).sum();
  for (const auto& t : updates) {
    q += t.weight * std::norm(a.dot(t.v.cast<std::complex<double>>()));
  }
  return q;
}

namespace {

void check_finite(const UeMoments& m) {
  bool ok = m.b.allFinite() && m.noise_diag.allFinite() &&
            m.gamma.diagonal.allFinite();
  for (const auto& t : m.gamma.updates) {
    ok = ok && std::isfinite(t.weight) && t.v.allFinite();
  }
  if (!ok) throw NumericalError("non-finite UL moment");
}

}  // namespace

MomentSet ul_moments_mmse(const EstimatorStatistics& s,
                          const PowerConfig& powers,
                          const PilotAssignment& assign) {
  const Eigen::Index num_ues = s.num_ues();
  const double tau = s.tau_p;
  const double noise = powers.noise_ul;
  const Eigen::VectorXd& p = powers.ul_data_power;
  const Eigen::VectorXd& pp = s.pilot_power;

  // sum_l p_l R'_l is shared by every UE.
  const Eigen::VectorXd interference = s.beta_prime * p;

  MomentSet out{Estimator::kMmse, {}};
  out.ue.resize(static_cast<std::size_t>(num_ues));
  for (Eigen::Index k = 0; k < num_ues; ++k) {
    UeMoments& um = out.ue[static_cast<std::size_t>(k)];
    const auto z = s.z.col(k).array();
    um.b = s.z.col(k);
    um.noise_diag = s.z.col(k);
    um.gamma.diagonal = (interference.array() * z -
                         p(k) * s.los_power.col(k).array().square() +
                         noise * z)
                            .matrix();
    for (int l : assign.cohort[static_cast<std::size_t>(k)]) {
      if (l == k) continue;
      Eigen::VectorXd zkl = (s.beta.col(l).array() * s.beta.col(k).array() /
                             s.lambda.col(k).array())
                                .matrix();
      um.gamma.updates.push_back({p(l) * pp(k) * pp(l) * tau * tau, zkl});
    }
    check_finite(um);
  }
  return out;
}

MomentSet ul_moments_lmmse(const EstimatorStatistics& s,
                           const PowerConfig& powers,
                           const PilotAssignment& assign) {
  const Eigen::Index num_ues = s.num_ues();
  const double tau = s.tau_p;
  const double noise = powers.noise_ul;
  const Eigen::VectorXd& p = powers.ul_data_power;
  const Eigen::VectorXd& pp = s.pilot_power;
  const Eigen::VectorXd interference = s.beta_prime * p;

  MomentSet out{Estimator::kLmmse, {}};
  out.ue.resize(static_cast<std::size_t>(num_ues));
  for (Eigen::Index k = 0; k < num_ues; ++k) {
    UeMoments& um = out.ue[static_cast<std::size_t>(k)];
    const double pt = pp(k) * tau;
    const Eigen::ArrayXd om = s.omega_prime.col(k).array();
    const Eigen::ArrayXd lam = s.lambda_prime.col(k).array();
    um.b = pt * s.omega_prime.col(k);
    um.noise_diag = um.b;

    Eigen::ArrayXd diag = pt * interference.array() * om + noise * pt * om;
    for (int l : assign.cohort[static_cast<std::size_t>(k)]) {
      const double w = p(l) * pp(k) * pp(l) * tau * tau;
      const Eigen::ArrayXd beta_l = s.beta.col(l).array();
      const Eigen::ArrayXd d =
          s.beta_prime.col(l).array() * s.beta_prime.col(k).array() / lam;
      diag += w * (beta_l.square() * om / lam +
                   2.0 * om / lam * s.los_power.col(l).array() * beta_l -
                   d.square());
      // The l == k rank-one term cancels against -p_k b b^H exactly.
      if (l != k) um.gamma.updates.push_back({w, d.matrix()});
    }
    um.gamma.diagonal = diag.matrix();
    check_finite(um);
  }
  return out;
}

MomentSet ul_moments_ls(const EstimatorStatistics& s,
                        const PowerConfig& powers,
                        const PilotAssignment& assign) {
  const Eigen::Index num_ues = s.num_ues();
  const double tau = s.tau_p;
  const double noise = powers.noise_ul;
  const Eigen::VectorXd& p = powers.ul_data_power;
  const Eigen::VectorXd& pp = s.pilot_power;
  const Eigen::VectorXd interference = s.beta_prime * p;

  MomentSet out{Estimator::kLs, {}};
  out.ue.resize(static_cast<std::size_t>(num_ues));
  for (Eigen::Index k = 0; k < num_ues; ++k) {
    UeMoments& um = out.ue[static_cast<std::size_t>(k)];
    const double pt = pp(k) * tau;
    const Eigen::ArrayXd lam = s.lambda_prime.col(k).array();
    um.b = s.beta_prime.col(k);
    um.noise_diag = (lam / pt).matrix();

    Eigen::ArrayXd diag = lam * interference.array() / pt + noise * lam / pt;
    for (int l : assign.cohort[static_cast<std::size_t>(k)]) {
      const double w = p(l) * pp(l) / pp(k);
      const Eigen::ArrayXd beta_l = s.beta.col(l).array();
      diag += w * (beta_l.square() +
                   2.0 * s.los_power.col(l).array() * beta_l -
                   s.beta_prime.col(l).array().square());
      if (l != k) um.gamma.updates.push_back({w, s.beta_prime.col(l)});
    }
    um.gamma.diagonal = diag.matrix();
    check_finite(um);
  }
  return out;
}

MomentSet ul_moments(Estimator e, const EstimatorStatistics& stats,
                     const PowerConfig& powers, const PilotAssignment& assign) {
  switch (e) {
    case Estimator::kMmse:
      return ul_moments_mmse(stats, powers, assign);
    case Estimator::kLmmse:
      return ul_moments_lmmse(stats, powers, assign);
    case Estimator::kLs:
      return ul_moments_ls(stats, powers, assign);
  }
  throw InvalidConfig("unknown estimator");
}

namespace {

template <typename Matrix, typename Vector>
Vector solve_hermitian(const Matrix& g, const Vector& b) {
  using Real = typename Eigen::NumTraits<typename Matrix::Scalar>::Real;
  const Eigen::Index n = g.rows();
  if (g.cols() != n || b.size() != n) {
    throw InvalidConfig("LSFD solve: dimension mismatch");
  }
  Eigen::Matrix<Real, Eigen::Dynamic, 1> scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real d = std::real(g(i, i));
    if (!(d > 0)) {
      throw NumericalError("LSFD solve: non-positive diagonal in moment matrix");
    }
    scale(i) = 1 / std::sqrt(d);
  }
  const Matrix eq = scale.asDiagonal() * g * scale.asDiagonal();
  const Vector rhs = scale.asDiagonal() * b;
  Eigen::LLT<Matrix> llt(eq);
  Vector y;
  if (llt.info() == Eigen::Success) {
    y = llt.solve(rhs);
  } else {
    Eigen::FullPivLU<Matrix> lu(eq);
    if (!lu.isInvertible()) {
      throw NumericalError("LSFD solve: singular moment matrix");
    }
    y = lu.solve(rhs);
  }
  Vector a = scale.asDiagonal() * y;
  if (!a.allFinite()) throw NumericalError("LSFD solve: non-finite weights");
  return a;
}

}  // namespace

Eigen::VectorXcd optimal_lsfd(const Eigen::VectorXcd& b,
                              const Eigen::MatrixXcd& gamma) {
  return solve_hermitian(gamma, b);
}

Eigen::VectorXcd optimal_lsfd(const UeMoments& m) {
  const Eigen::VectorXd a = solve_hermitian(m.gamma.dense(), m.b);
  return a.cast<std::complex<double>>();
}

double ul_sinr(const Eigen::VectorXcd& b, const Eigen::MatrixXcd& gamma,
               const Eigen::VectorXcd& a, double data_power) {
  const double den = std::real(a.dot(gamma * a));
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw NumericalError("UL SINR: degenerate denominator a^H G a");
  }
  return data_power * std::norm(a.dot(b)) / den;
}

double ul_sinr(const UeMoments& m, const Eigen::VectorXcd& a,
               double data_power) {
  const double den = m.gamma.quadratic(a);
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw NumericalError("UL SINR: degenerate denominator a^H G a");
  }
  return data_power * std::norm(a.dot(m.b.cast<std::complex<double>>())) / den;
}

double ul_sinr_optimal(const UeMoments& m, double data_power) {
  const Eigen::VectorXd g_inv_b = solve_hermitian(m.gamma.dense(), m.b);
  return data_power * m.b.dot(g_inv_b);
}

double ul_sinr_trace_form(Estimator e, const EstimatorStatistics& s,
                          const PowerConfig& powers,
                          const PilotAssignment& assign, int k,
                          const Eigen::VectorXcd& a) {
  const double tau = s.tau_p;
  const double noise = powers.noise_ul;
  const Eigen::VectorXd& p = powers.ul_data_power;
  const Eigen::VectorXd& pp = s.pilot_power;
  const Eigen::VectorXd a2 = a.cwiseAbs2();
  // tr(A X) and tr(A^H X A) for diagonal X stored as a vector.
  auto tr = [&](const Eigen::VectorXd& x) { return a.dot(x.cast<std::complex<double>>()); };
  auto quad = [&](const Eigen::ArrayXd& x) { return (a2.array() * x).sum(); };
  const auto& cohort = assign.cohort[static_cast<std::size_t>(k)];
  const Eigen::Index num_ues = s.num_ues();

  double num = 0.0;
  double den = 0.0;
  switch (e) {
    case Estimator::kMmse: {
      const Eigen::ArrayXd z = s.z.col(k).array();
      num = p(k) * std::norm(tr(s.z.col(k)));
      for (Eigen::Index l = 0; l < num_ues; ++l) {
        den += p(l) * quad(s.beta_prime.col(l).array() * z);
      }
      for (int l : cohort) {
        if (l == k) continue;
        const Eigen::VectorXd x = (s.beta.col(l).array() *
                                   s.beta.col(k).array() /
                                   s.lambda.col(k).array())
                                      .matrix();
        den += p(l) * pp(k) * pp(l) * tau * tau * std::norm(tr(x));
      }
      den += quad(noise * z - p(k) * s.los_power.col(k).array().square());
      return num / den;
    }
    case Estimator::kLmmse: {
      const Eigen::ArrayXd om = s.omega_prime.col(k).array();
      const Eigen::ArrayXd lam = s.lambda_prime.col(k).array();
      num = p(k) * pp(k) * pp(k) * tau * tau *
            std::norm(tr(s.omega_prime.col(k)));
      for (Eigen::Index l = 0; l < num_ues; ++l) {
        den += p(l) * pp(k) * tau * quad(s.beta_prime.col(l).array() * om);
      }
      for (int l : cohort) {
        const Eigen::ArrayXd beta_l = s.beta.col(l).array();
        const Eigen::ArrayXd d =
            s.beta_prime.col(l).array() * s.beta_prime.col(k).array() / lam;
        const double t2 =
            pp(k) * pp(l) * tau * tau *
            (quad(beta_l.square() * om / lam) + std::norm(tr(d.matrix())) +
             2.0 * quad(om / lam * s.los_power.col(l).array() * beta_l) -
             quad(d.square()));
        den += p(l) * t2;
      }
      den += -num + noise * pp(k) * tau * quad(om);
      return num / den;
    }
    case Estimator::kLs: {
      const double pt = pp(k) * tau;
      const Eigen::ArrayXd lam = s.lambda_prime.col(k).array();
      num = p(k) * std::norm(tr(s.beta_prime.col(k)));
      for (Eigen::Index l = 0; l < num_ues; ++l) {
        den += p(l) / pt * quad(lam * s.beta_prime.col(l).array());
      }
      for (int l : cohort) {
        const Eigen::ArrayXd beta_l = s.beta.col(l).array();
        const Eigen::ArrayXd bp_l = s.beta_prime.col(l).array();
        const double t2 =
            pp(l) / pp(k) *
            (quad(beta_l.square() + 2.0 * s.los_power.col(l).array() * beta_l) +
             std::norm(tr(s.beta_prime.col(l))) - quad(bp_l.square()));
        den += p(l) * t2;
      }
      den += -num + noise / pt * quad(lam);
      return num / den;
    }
  }
  throw InvalidConfig("unknown estimator");
}

double ul_se(double sinr, const FrameConfig& frame) {
  if (!(sinr >= 0.0)) throw DomainError("SINR must be >= 0");
  return static_cast<double>(frame.tau_u) / frame.tau_c * std::log2(1.0 + sinr);
}

}  // namespace cfmimo
