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

#include "cfmimo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "cfmimo/error.hpp"
#include "cfmimo/parallel.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

void McConfig::validate(std::size_t min_trials) const {
  if (trials < min_trials) {
    throw InvalidConfig("trials must be >= " + std::to_string(min_trials));
  }
  if (batches < 1) throw InvalidConfig("batches must be >= 1");
}

namespace {

using cd = std::complex<double>;

// Running mean and co-moment of a real vector (Welford / Chan et al.).
struct VectorMoments {
  std::size_t n = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd m2;

  explicit VectorMoments(Eigen::Index dim = 0)
      : mean(Eigen::VectorXd::Zero(dim)), m2(Eigen::MatrixXd::Zero(dim, dim)) {}

  void add(const Eigen::VectorXd& x) {
    ++n;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2.noalias() += delta * (x - mean).transpose();
  }

  void merge(const VectorMoments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double nt = na + nb;
    const Eigen::VectorXd delta = o.mean - mean;
    mean += delta * (nb / nt);
    m2 += o.m2 + delta * delta.transpose() * (na * nb / nt);
    n += o.n;
  }

  Eigen::MatrixXd covariance() const {
    return n > 1 ? Eigen::MatrixXd(m2 / static_cast<double>(n - 1))
                 : Eigen::MatrixXd::Zero(m2.rows(), m2.cols());
  }
};

// f = S / (W - S + c0), S = sum_j c_j |E u_j|^2. x = [Re u_0, Im u_0, ...,
// W] per trial.
struct Quotient {
  Eigen::VectorXd c;
  double c0 = 0.0;

  double value(const Eigen::VectorXd& mean) const {
    const Eigen::Index j_count = c.size();
    double s = 0.0;
    for (Eigen::Index j = 0; j < j_count; ++j) {
      s += c(j) * (mean(2 * j) * mean(2 * j) + mean(2 * j + 1) * mean(2 * j + 1));
    }
    const double g = mean(2 * j_count) - s + c0;
    if (!(g > 0.0)) throw NumericalError("Monte Carlo SINR denominator <= 0");
    return s / g;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& mean) const {
    const Eigen::Index j_count = c.size();
    double s = 0.0;
    for (Eigen::Index j = 0; j < j_count; ++j) {
      s += c(j) * (mean(2 * j) * mean(2 * j) + mean(2 * j + 1) * mean(2 * j + 1));
    }
    const double w = mean(2 * j_count);
    const double g = w - s + c0;
    Eigen::VectorXd grad(2 * j_count + 1);
    const double ds = (w + c0) / (g * g);
    for (Eigen::Index j = 0; j < 2 * j_count; ++j) {
      grad(j) = ds * 2.0 * c(j / 2) * mean(j);
    }
    grad(2 * j_count) = -s / (g * g);
    return grad;
  }
};

McEstimate summarize(const Quotient& q, const std::vector<VectorMoments>& batches) {
  VectorMoments total(q.c.size() * 2 + 1);
  for (const auto& b : batches) total.merge(b);
  McEstimate est;
  est.trials = total.n;
  est.value = q.value(total.mean);
  const Eigen::VectorXd grad = q.gradient(total.mean);
  const double var = grad.dot(total.covariance() * grad);
  est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(total.n));

  const std::size_t nb = batches.size();
  if (nb > 1) {
    std::vector<double> loo(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      VectorMoments part(q.c.size() * 2 + 1);
      for (std::size_t j = 0; j < nb; ++j) {
        if (j != i) part.merge(batches[j]);
      }
      loo[i] = q.value(part.mean);
    }
    double avg = 0.0;
    for (double v : loo) avg += v;
    avg /= static_cast<double>(nb);
    double ss = 0.0;
    for (double v : loo) ss += (v - avg) * (v - avg);
    est.jackknife_error =
        std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
  }
  return est;
}

// Runs cfg.trials blocks split into contiguous batches; each trial owns the
// substream (seed, tag, trial). Batches are reduced by the caller in index
// order, so results do not depend on the worker count.
template <typename Acc, typename Init, typename Trial>
std::vector<Acc> run_batches(const McConfig& cfg, Init init, Trial trial) {
  const std::size_t nb = std::min<std::size_t>(
      static_cast<std::size_t>(cfg.batches), std::max<std::size_t>(cfg.trials, 1));
  std::vector<Acc> out(nb);
  parallel_for(nb, cfg.threads, [&](std::size_t b) {
    Acc acc = init();
    const std::size_t begin = b * cfg.trials / nb;
    const std::size_t end = (b + 1) * cfg.trials / nb;
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng = make_stream(cfg.seed, StreamPurpose::kMonteCarlo, {cfg.tag, t});
      trial(rng, acc);
    }
    out[b] = std::move(acc);
  });
  return out;
}

ChannelRealization draw_block(const NetworkInstance& net,
                              const PilotAssignment& assign,
                              const PowerConfig& powers,
                              const FrameConfig& frame, Rng& rng) {
  ChannelRealization real = sample_channel(net, rng);
  receive_pilots(real, assign, powers, frame, rng);
  return real;
}

enum class ProbeKind { kUl, kDlCoherent, kDlNonCoherent };

struct Probe {
  ProbeKind kind = ProbeKind::kUl;
  Estimator estimator = Estimator::kMmse;
  int ue = 0;
  Eigen::VectorXcd weights;  // UL combining weights
  Quotient quotient;
};

// Per-estimator quantities needed to turn estimates into precoders.
struct DlSetup {
  DLPowerAllocation coherent;
  DLPowerAllocation noncoherent;
  Eigen::MatrixXd sqrt_d;       // coherent precoder scale
  Eigen::MatrixXd inv_norm;     // 1 / sqrt(E|h-hat|^2), 0 where undefined
};

DlSetup make_dl_setup(const EstimatorStatistics& stats,
                      const PowerConfig& powers, Estimator e) {
  DlSetup s;
  s.coherent = dl_power_allocation(stats, powers, e, DlMode::kCoherent);
  s.noncoherent = dl_power_allocation(stats, powers, e, DlMode::kNonCoherent);
  s.sqrt_d = s.coherent.d.cwiseSqrt();
  const Eigen::ArrayXXd pw = s.noncoherent.estimate_power.array();
  s.inv_norm = (pw > 0.0).select(pw.sqrt().inverse(), 0.0).matrix();
  return s;
}

std::vector<McEstimate> run_probes(const NetworkInstance& net,
                                   const PilotAssignment& assign,
                                   const PowerConfig& powers,
                                   const FrameConfig& frame,
                                   const std::vector<Probe>& probes,
                                   const McConfig& cfg) {
  cfg.validate();
  const EstimatorStatistics stats =
      compute_statistics(net, assign, powers, frame);
  const Eigen::Index num_aps = stats.num_aps();
  const Eigen::Index num_ues = stats.num_ues();

  bool needed[3] = {false, false, false};
  bool needs_dl[3] = {false, false, false};
  for (const Probe& p : probes) {
    needed[static_cast<int>(p.estimator)] = true;
    if (p.kind != ProbeKind::kUl) needs_dl[static_cast<int>(p.estimator)] = true;
  }
  std::vector<DlSetup> dl(3);
  for (Estimator e : kAllEstimators) {
    if (needs_dl[static_cast<int>(e)]) {
      dl[static_cast<std::size_t>(e)] = make_dl_setup(stats, powers, e);
    }
  }

  using Acc = std::vector<VectorMoments>;
  auto init = [&] {
    Acc acc;
    acc.reserve(probes.size());
    for (const Probe& p : probes) acc.emplace_back(p.quotient.c.size() * 2 + 1);
    return acc;
  };
  auto trial = [&](Rng& rng, Acc& acc) {
    const ChannelRealization real = draw_block(net, assign, powers, frame, rng);
    Eigen::MatrixXcd est[3];
    for (Estimator e : kAllEstimators) {
      if (needed[static_cast<int>(e)]) {
        est[static_cast<int>(e)] =
            estimate(e, real, stats, assign, powers, frame);
      }
    }
    const Eigen::MatrixXcd h_conj = real.h.conjugate();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Probe& p = probes[i];
      const Eigen::MatrixXcd& v = est[static_cast<int>(p.estimator)];
      const Eigen::Index k = p.ue;
      const Eigen::Index dim = p.quotient.c.size() * 2 + 1;
      Eigen::VectorXd x(dim);
      switch (p.kind) {
        case ProbeKind::kUl: {
          const Eigen::VectorXcd t =
              p.weights.conjugate().cwiseProduct(v.col(k).conjugate());
          const Eigen::VectorXcd r = real.h.transpose() * t;
          double w = powers.noise_ul * t.squaredNorm();
          for (Eigen::Index l = 0; l < num_ues; ++l) {
            w += powers.ul_data_power(l) * std::norm(r(l));
          }
          x << r(k).real(), r(k).imag(), w;
          break;
        }
        case ProbeKind::kDlCoherent: {
          const DlSetup& s = dl[static_cast<std::size_t>(p.estimator)];
          const Eigen::MatrixXcd prec = s.sqrt_d.cast<cd>().cwiseProduct(v);
          const Eigen::VectorXcd r = prec.transpose() * h_conj.col(k);
          x << r(k).real(), r(k).imag(), r.squaredNorm();
          break;
        }
        case ProbeKind::kDlNonCoherent: {
          const DlSetup& s = dl[static_cast<std::size_t>(p.estimator)];
          double w = 0.0;
          for (Eigen::Index n = 0; n < num_aps; ++n) {
            const double gain = std::norm(real.h(n, k));
            for (Eigen::Index l = 0; l < num_ues; ++l) {
              w += s.noncoherent.rho(n, l) * gain *
                   std::norm(v(n, l)) * s.inv_norm(n, l) * s.inv_norm(n, l);
            }
            const cd u = h_conj(n, k) * v(n, k) * s.inv_norm(n, k);
            x(2 * n) = u.real();
            x(2 * n + 1) = u.imag();
          }
          x(2 * num_aps) = w;
          break;
        }
      }
      acc[i].add(x);
    }
  };
  const std::vector<Acc> batches = run_batches<Acc>(cfg, init, trial);

  std::vector<McEstimate> out;
  out.reserve(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    std::vector<VectorMoments> per_probe;
    per_probe.reserve(batches.size());
    for (const Acc& b : batches) per_probe.push_back(b[i]);
    out.push_back(summarize(probes[i].quotient, per_probe));
  }
  return out;
}

Probe ul_probe(Estimator e, int k, Eigen::VectorXcd a, double data_power) {
  Probe p;
  p.kind = ProbeKind::kUl;
  p.estimator = e;
  p.ue = k;
  p.weights = std::move(a);
  p.quotient.c = Eigen::VectorXd::Constant(1, data_power);
  p.quotient.c0 = 0.0;
  return p;
}

Probe dl_probe(DlMode mode, Estimator e, int k, const EstimatorStatistics& stats,
               const PowerConfig& powers) {
  Probe p;
  p.estimator = e;
  p.ue = k;
  p.quotient.c0 = powers.noise_dl;
  if (mode == DlMode::kCoherent) {
    p.kind = ProbeKind::kDlCoherent;
    p.quotient.c = Eigen::VectorXd::Ones(1);
  } else {
    p.kind = ProbeKind::kDlNonCoherent;
    const DLPowerAllocation alloc =
        dl_power_allocation(stats, powers, e, DlMode::kNonCoherent);
    p.quotient.c = alloc.rho.col(k);
  }
  return p;
}

}  // namespace

Eigen::MatrixXcd EmpiricalMoments::gamma(int k) const {
  const auto ku = static_cast<std::size_t>(k);
  Eigen::MatrixXcd g = interf[ku] - data_power(k) * b[ku] * b[ku].adjoint();
  g.diagonal() += (noise * noise_diag[ku]).cast<cd>();
  return g;
}

EmpiricalMoments mc_ul_moments(const NetworkInstance& net,
                               const PilotAssignment& assign,
                               const PowerConfig& powers,
                               const FrameConfig& frame, Estimator e,
                               const McConfig& cfg) {
  cfg.validate();
  const EstimatorStatistics stats =
      compute_statistics(net, assign, powers, frame);
  const Eigen::Index num_aps = stats.num_aps();
  const Eigen::Index num_ues = stats.num_ues();

  struct Acc {
    std::size_t n = 0;
    std::vector<Eigen::VectorXcd> b;
    std::vector<Eigen::MatrixXcd> interf;
    std::vector<Eigen::VectorXd> noise;
  };
  auto init = [&] {
    Acc a;
    a.b.assign(num_ues, Eigen::VectorXcd::Zero(num_aps));
    a.interf.assign(num_ues, Eigen::MatrixXcd::Zero(num_aps, num_aps));
    a.noise.assign(num_ues, Eigen::VectorXd::Zero(num_aps));
    return a;
  };
  auto trial = [&](Rng& rng, Acc& acc) {
    const ChannelRealization real = draw_block(net, assign, powers, frame, rng);
    const Eigen::MatrixXcd v = estimate(e, real, stats, assign, powers, frame);
    ++acc.n;
    for (Eigen::Index k = 0; k < num_ues; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const Eigen::VectorXcd vc = v.col(k).conjugate();
      for (Eigen::Index l = 0; l < num_ues; ++l) {
        const Eigen::VectorXcd x = vc.cwiseProduct(real.h.col(l));
        acc.interf[ku].noalias() += powers.ul_data_power(l) * x * x.adjoint();
        if (l == k) acc.b[ku] += x;
      }
      acc.noise[ku] += v.col(k).cwiseAbs2();
    }
  };
  std::vector<Acc> batches = run_batches<Acc>(cfg, init, trial);

  EmpiricalMoments out;
  out.estimator = e;
  out.data_power = powers.ul_data_power;
  out.noise = powers.noise_ul;
  Acc total = init();
  for (Acc& a : batches) {
    total.n += a.n;
    for (std::size_t k = 0; k < static_cast<std::size_t>(num_ues); ++k) {
      total.b[k] += a.b[k];
      total.interf[k] += a.interf[k];
      total.noise[k] += a.noise[k];
    }
    out.batch_trials.push_back(a.n);
    out.batch_b.push_back(std::move(a.b));
    out.batch_interf.push_back(std::move(a.interf));
    out.batch_noise.push_back(std::move(a.noise));
  }
  out.trials = total.n;
  const double n = static_cast<double>(total.n);
  for (std::size_t k = 0; k < static_cast<std::size_t>(num_ues); ++k) {
    out.b.push_back(total.b[k] / n);
    const Eigen::MatrixXcd g = total.interf[k] / n;
    out.interf.push_back(0.5 * (g + g.adjoint()));
    out.noise_diag.push_back(total.noise[k] / n);
  }
  return out;
}

McEstimate mc_ul_sinr(const EmpiricalMoments& mom, int k,
                      const Eigen::VectorXcd& a, double data_power) {
  const auto ku = static_cast<std::size_t>(k);
  if (k < 0 || ku >= mom.b.size()) throw InvalidConfig("UE index out of range");
  auto quotient = [&](const Eigen::VectorXcd& b, const Eigen::MatrixXcd& interf,
                      const Eigen::VectorXd& noise_diag) {
    const double sig = data_power * std::norm(a.dot(b));
    Eigen::MatrixXcd g = interf - data_power * b * b.adjoint();
    g.diagonal() += (mom.noise * noise_diag).cast<cd>();
    const double den = a.dot(g * a).real();
    if (!(den > 0.0)) throw NumericalError("degenerate UL SINR denominator");
    return sig / den;
  };

  McEstimate est;
  est.trials = mom.trials;
  est.value = quotient(mom.b[ku], mom.interf[ku], mom.noise_diag[ku]);
  const std::size_t nb = mom.batch_trials.size();
  if (nb > 1) {
    const double n = static_cast<double>(mom.trials);
    const Eigen::VectorXcd sum_b = mom.b[ku] * n;
    const Eigen::MatrixXcd sum_i = mom.interf[ku] * n;
    const Eigen::VectorXd sum_n = mom.noise_diag[ku] * n;
    std::vector<double> loo(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      const double rest = n - static_cast<double>(mom.batch_trials[i]);
      const Eigen::MatrixXcd gi = (sum_i - mom.batch_interf[i][ku]) / rest;
      loo[i] = quotient((sum_b - mom.batch_b[i][ku]) / rest,
                        0.5 * (gi + gi.adjoint()),
                        (sum_n - mom.batch_noise[i][ku]) / rest);
    }
    double avg = 0.0;
    for (double v : loo) avg += v;
    avg /= static_cast<double>(nb);
    double ss = 0.0;
    for (double v : loo) ss += (v - avg) * (v - avg);
    est.jackknife_error =
        std::sqrt(ss * static_cast<double>(nb - 1) / static_cast<double>(nb));
  }
  est.std_error = est.jackknife_error;
  return est;
}

std::vector<McEstimate> mc_ul_sinr_direct(
    const NetworkInstance& net, const PilotAssignment& assign,
    const PowerConfig& powers, const FrameConfig& frame, Estimator e,
    const std::vector<Eigen::VectorXcd>& weights, const McConfig& cfg) {
  if (weights.size() != static_cast<std::size_t>(net.num_ues())) {
    throw InvalidConfig("need one weight vector per UE");
  }
  std::vector<Probe> probes;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (static_cast<std::size_t>(weights[k].size()) != net.num_aps()) {
      throw InvalidConfig("weight vector length must equal M");
    }
    probes.push_back(ul_probe(e, static_cast<int>(k), weights[k],
                              powers.ul_data_power(static_cast<Eigen::Index>(k))));
  }
  return run_probes(net, assign, powers, frame, probes, cfg);
}

std::vector<McEstimate> mc_dl_sinr(const NetworkInstance& net,
                                   const PilotAssignment& assign,
                                   const PowerConfig& powers,
                                   const FrameConfig& frame, DlMode mode,
                                   Estimator e, const McConfig& cfg) {
  const EstimatorStatistics stats =
      compute_statistics(net, assign, powers, frame);
  std::vector<Probe> probes;
  for (Eigen::Index k = 0; k < stats.num_ues(); ++k) {
    probes.push_back(dl_probe(mode, e, static_cast<int>(k), stats, powers));
  }
  return run_probes(net, assign, powers, frame, probes, cfg);
}

MseEstimate mc_estimator_mse(const NetworkInstance& net,
                             const PilotAssignment& assign,
                             const PowerConfig& powers,
                             const FrameConfig& frame, Estimator e,
                             const McConfig& cfg) {
  cfg.validate();
  const EstimatorStatistics stats =
      compute_statistics(net, assign, powers, frame);
  const Eigen::Index links = stats.num_aps() * stats.num_ues();
  auto init = [&] { return VectorMoments(links); };
  auto trial = [&](Rng& rng, VectorMoments& acc) {
    const ChannelRealization real = draw_block(net, assign, powers, frame, rng);
    const Eigen::MatrixXcd err =
        real.h - estimate(e, real, stats, assign, powers, frame);
    const Eigen::MatrixXd sq = err.cwiseAbs2();
    acc.add(Eigen::Map<const Eigen::VectorXd>(sq.data(), links));
  };
  // Only the diagonal of the co-moment is needed; links stay small here.
  const std::vector<VectorMoments> batches =
      run_batches<VectorMoments>(cfg, init, trial);
  VectorMoments total(links);
  for (const auto& b : batches) total.merge(b);
  MseEstimate out;
  out.value = Eigen::Map<const Eigen::MatrixXd>(total.mean.data(),
                                                stats.num_aps(), stats.num_ues());
  const Eigen::VectorXd se =
      (total.covariance().diagonal() / static_cast<double>(total.n)).cwiseSqrt();
  out.std_error =
      Eigen::Map<const Eigen::MatrixXd>(se.data(), stats.num_aps(), stats.num_ues());
  return out;
}

ValidationReport validate(double closed_form, const McEstimate& mc, double z) {
  if (!(z > 0.0)) throw InvalidConfig("z threshold must be > 0");
  if (!(mc.std_error >= 0.0)) throw DomainError("std_error must be >= 0");
  ValidationReport r;
  r.closed_form = closed_form;
  r.mc = mc;
  const double gap = std::abs(closed_form - mc.value);
  if (mc.std_error > 0.0) {
    r.z_score = gap / mc.std_error;
    r.pass = gap <= z * mc.std_error;
  } else {
    const double scale = std::max(std::abs(closed_form), std::abs(mc.value));
    r.pass = gap <= 1e-9 * scale;
    r.z_score = r.pass ? 0.0 : INFINITY;
  }
  return r;
}

std::vector<OracleCheck> oracle_suite(const NetworkInstance& net,
                                      const PilotAssignment& assign,
                                      const PowerConfig& powers,
                                      const FrameConfig& frame,
                                      const McConfig& cfg, double z) {
  const EstimatorStatistics stats =
      compute_statistics(net, assign, powers, frame);
  const Eigen::Index num_ues = stats.num_ues();
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(stats.num_aps());

  std::vector<OracleCheck> checks;
  std::vector<Probe> probes;
  auto add = [&](Estimator e, const char* scheme, Eigen::Index k, double closed,
                 Probe probe) {
    OracleCheck c;
    c.estimator = e;
    c.scheme = scheme;
    c.ue = static_cast<int>(k);
    c.report.closed_form = closed;
    checks.push_back(std::move(c));
    probes.push_back(std::move(probe));
  };

  for (Estimator e : kAllEstimators) {
    const MomentSet moments = ul_moments(e, stats, powers, assign);
    for (Eigen::Index k = 0; k < num_ues; ++k) {
      const UeMoments& m = moments.ue[static_cast<std::size_t>(k)];
      const double p = powers.ul_data_power(k);
      add(e, "ul_single", k, ul_sinr(m, ones, p),
          ul_probe(e, static_cast<int>(k), ones, p));
      const Eigen::VectorXcd a = optimal_lsfd(m);
      add(e, "ul_lsfd", k, ul_sinr(m, a, p),
          ul_probe(e, static_cast<int>(k), a, p));
    }
    for (DlMode mode : {DlMode::kCoherent, DlMode::kNonCoherent}) {
      const DLPowerAllocation alloc =
          dl_power_allocation(stats, powers, e, mode);
      const Eigen::VectorXd closed =
          mode == DlMode::kCoherent
              ? dl_sinr_coherent(stats, alloc, assign, powers.noise_dl)
              : dl_sinr_noncoherent(stats, alloc, assign, powers.noise_dl);
      const char* scheme =
          mode == DlMode::kCoherent ? "dl_coherent" : "dl_noncoherent";
      for (Eigen::Index k = 0; k < num_ues; ++k) {
        add(e, scheme, k, closed(k),
            dl_probe(mode, e, static_cast<int>(k), stats, powers));
      }
    }
  }

  const std::vector<McEstimate> mc =
      run_probes(net, assign, powers, frame, probes, cfg);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    checks[i].report = validate(checks[i].report.closed_form, mc[i], z);
  }
  return checks;
}

}  // namespace cfmimo
