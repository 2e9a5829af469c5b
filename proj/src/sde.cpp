/*
 * Copyright 2025 The ITM Bench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "itm/sde.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "itm/analysis.h"
#include "itm/error.h"
#include "itm/metrics.h"
#include "itm/parallel.h"
#include "itm/rng.h"

namespace itm {

namespace {

double step_noise(std::uint64_t stream, std::size_t element, std::size_t step) {
  return keyed_normal(derive_seed(derive_seed(stream, element), step));
}

}  // namespace

SdeSchedule SdeSchedule::constant(std::size_t steps, double theta, double sigma, double dt) {
  SdeSchedule s;
  s.theta.assign(steps, theta);
  s.sigma.assign(steps, sigma);
  s.dt = dt;
  s.validate();
  return s;
}

SdeSchedule SdeSchedule::cosine(std::size_t steps, double lambda) {
  if (steps == 0) throw ValidationError("SDE schedule needs at least one step");
  if (!(lambda >= 0.0)) throw ValidationError("SDE stationary deviation must be >= 0");
  constexpr double s = 0.008;
  const std::size_t n = steps + 2;
  auto f = [&](std::size_t x) {
    const double c = std::cos((static_cast<double>(x) / n + s) / (1.0 + s) * std::numbers::pi / 2.0);
    return c * c;
  };
  const double f0 = f(0);
  SdeSchedule out;
  double total = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double th = 1.0 - f(k + 1) / f0;
    out.theta.push_back(th);
    out.sigma.push_back(std::sqrt(2.0 * th) * lambda);
    total += th;
  }
  out.dt = -std::log(0.01) / total;
  out.validate();
  return out;
}

void SdeSchedule::validate() const {
  if (theta.empty()) throw ValidationError("SDE schedule needs at least one step");
  if (theta.size() != sigma.size()) {
    throw ValidationError("SDE schedule: theta and sigma lengths differ");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("SDE schedule: dt must be > 0");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!(theta[k] > 0.0) || !std::isfinite(theta[k])) {
      throw ValidationError("SDE schedule: theta must be > 0 at step " + std::to_string(k));
    }
    if (!(sigma[k] >= 0.0) || !std::isfinite(sigma[k])) {
      throw ValidationError("SDE schedule: sigma must be >= 0 at step " + std::to_string(k));
    }
    if (!(theta[k] * dt < 1.0)) {
      throw ValidationError("SDE schedule: theta * dt must be < 1 at step " + std::to_string(k));
    }
  }
}

Ensemble forward_simulate(std::span<const double> x0, std::span<const double> mu,
                          const SdeSchedule& sched, std::uint64_t seed, std::size_t n_traj,
                          Recording recording, int jobs) {
  sched.validate();
  if (x0.size() != mu.size()) throw ShapeError("forward_simulate: x0 and mu lengths differ");
  if (x0.empty() || n_traj == 0) throw ValidationError("forward_simulate: empty ensemble");
  const std::size_t dim = x0.size();
  const std::size_t steps = sched.steps();
  Ensemble ens;
  ens.trajectories = n_traj;
  ens.dim = dim;
  ens.frames = recording == Recording::kFull ? steps + 1 : 1;
  ens.data.resize(n_traj * ens.frames * dim);
  const std::uint64_t stream = derive_seed(seed, "forward");
  const double sqrt_dt = std::sqrt(sched.dt);

  parallel_for(n_traj, jobs, [&](std::size_t j) {
    std::vector<double> x(x0.begin(), x0.end());
    double* out = ens.data.data() + j * ens.frames * dim;
    if (recording == Recording::kFull) std::copy(x.begin(), x.end(), out);
    for (std::size_t k = 0; k < steps; ++k) {
      const double th = sched.theta[k];
      const double sg = sched.sigma[k];
      for (std::size_t e = 0; e < dim; ++e) {
        double next = x[e] + th * (mu[e] - x[e]) * sched.dt;
        if (sg > 0.0) next += sg * sqrt_dt * step_noise(stream, j * dim + e, k);
        x[e] = next;
      }
      if (recording == Recording::kFull) std::copy(x.begin(), x.end(), out + (k + 1) * dim);
    }
    if (recording == Recording::kFinal) std::copy(x.begin(), x.end(), out);
  });
  return ens;
}

std::vector<double> backward_simulate(std::span<const double> xT, std::span<const double> mu,
                                      const SdeSchedule& sched, const ScoreFn& score_fn,
                                      std::uint64_t seed, std::size_t trajectory,
                                      std::vector<double>* record) {
  sched.validate();
  if (xT.size() != mu.size()) throw ShapeError("backward_simulate: xT and mu lengths differ");
  const std::size_t dim = xT.size();
  const std::size_t steps = sched.steps();
  const std::uint64_t stream = derive_seed(seed, "backward");
  const double sqrt_dt = std::sqrt(sched.dt);
  std::vector<double> x(xT.begin(), xT.end());
  std::vector<double> score(dim, 0.0);
  if (record) {
    // Frames stored in time order: record[k * dim ..] holds x_k.
    record->assign((steps + 1) * dim, 0.0);
    std::copy(x.begin(), x.end(), record->begin() + static_cast<std::ptrdiff_t>(steps * dim));
  }
  for (std::size_t k = steps; k-- > 0;) {
    const double th = sched.theta[k];
    const double sg = sched.sigma[k];
    if (sg > 0.0) {
      if (!score_fn) throw ValidationError("backward_simulate: a score function is required");
      score_fn(SdeState{x, mu, k + 1}, score);
    }
    const double denom = 1.0 - th * sched.dt;
    for (std::size_t e = 0; e < dim; ++e) {
      double delta = x[e] - mu[e];
      if (sg > 0.0) {
        delta += sg * sg * score[e] * sched.dt +
                 sg * sqrt_dt * step_noise(stream, trajectory * dim + e, k);
      }
      x[e] = mu[e] + delta / denom;
      if (!std::isfinite(x[e])) {
        throw NumericError("backward_simulate: non-finite state at step " + std::to_string(k));
      }
    }
    if (record) std::copy(x.begin(), x.end(), record->begin() + static_cast<std::ptrdiff_t>(k * dim));
  }
  return x;
}

Ensemble backward_ensemble(const Ensemble& forward, std::span<const double> mu,
                           const SdeSchedule& sched, const ScoreFn& score_fn,
                           std::uint64_t seed, int jobs) {
  Ensemble out;
  out.trajectories = forward.trajectories;
  out.dim = forward.dim;
  out.frames = 1;
  out.data.resize(out.trajectories * out.dim);
  parallel_for(forward.trajectories, jobs, [&](std::size_t j) {
    const auto x = backward_simulate(forward.final_state(j), mu, sched, score_fn, seed, j);
    std::copy(x.begin(), x.end(), out.data.begin() + static_cast<std::ptrdiff_t>(j * out.dim));
  });
  return out;
}

Moments ou_moments(double x0, double mu, double theta, double sigma, double t) {
  if (!(theta > 0.0)) throw DomainError("ou_moments: theta must be > 0");
  if (!(t >= 0.0)) throw DomainError("ou_moments: t must be >= 0");
  return {mu + (x0 - mu) * std::exp(-theta * t),
          sigma * sigma / (2.0 * theta) * -std::expm1(-2.0 * theta * t)};
}

std::vector<Moments> discrete_moments(double x0, double mu, const SdeSchedule& sched) {
  sched.validate();
  std::vector<Moments> out;
  out.reserve(sched.steps() + 1);
  Moments m{x0, 0.0};
  out.push_back(m);
  for (std::size_t k = 0; k < sched.steps(); ++k) {
    const double a = 1.0 - sched.theta[k] * sched.dt;
    m.mean = m.mean + sched.theta[k] * (mu - m.mean) * sched.dt;
    m.variance = a * a * m.variance + sched.sigma[k] * sched.sigma[k] * sched.dt;
    out.push_back(m);
  }
  return out;
}

double gaussian_score(double x, double m, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw NumericError("gaussian_score: variance must be finite and > 0");
  }
  return -(x - m) / v;
}

double ou_bridge_mean(double x_t, double x0, double mu, double theta, double t_prev, double t) {
  if (!(theta > 0.0)) throw DomainError("ou_bridge_mean: theta must be > 0");
  if (!(t_prev >= 0.0 && t > t_prev)) throw DomainError("ou_bridge_mean: need 0 <= t_prev < t");
  const double a = theta * t_prev;
  const double b = theta * t;
  const double d = b - a;
  const double denom = -std::expm1(-2.0 * b);
  return mu + (-std::expm1(-2.0 * a) * std::exp(-d) * (x_t - mu) +
               -std::expm1(-2.0 * d) * std::exp(-a) * (x0 - mu)) /
                  denom;
}

ScoreFn gaussian_score_fn(std::span<const double> x0, std::span<const double> mu,
                          const SdeSchedule& sched) {
  if (x0.size() != mu.size()) throw ShapeError("gaussian_score_fn: x0 and mu lengths differ");
  // Moments are affine in x0 - mu: m_k = mu + (x0 - mu) P_k, v_k shared.
  const auto unit = discrete_moments(1.0, 0.0, sched);
  std::vector<double> decay(unit.size());
  std::vector<double> variance(unit.size());
  for (std::size_t k = 0; k < unit.size(); ++k) {
    decay[k] = unit[k].mean;
    variance[k] = unit[k].variance;
  }
  std::vector<double> offset(x0.size());
  std::vector<double> target(mu.begin(), mu.end());
  for (std::size_t e = 0; e < x0.size(); ++e) offset[e] = x0[e] - mu[e];
  return [decay = std::move(decay), variance = std::move(variance), offset = std::move(offset),
          target = std::move(target)](const SdeState& s, std::span<double> score) {
    if (s.x.size() != offset.size()) throw ShapeError("gaussian score: state length mismatch");
    if (s.t >= decay.size()) throw ValidationError("gaussian score: step out of range");
    for (std::size_t e = 0; e < s.x.size(); ++e) {
      score[e] = gaussian_score(s.x[e], target[e] + offset[e] * decay[s.t], variance[s.t]);
    }
  };
}

namespace {

std::vector<double> pu_state(const LinearImage& img, const PuEncoding& enc,
                             const DisplayMapping& dm, double norm) {
  const RgbField pu = pu_encode_image(img, enc, dm);
  std::vector<double> out(pu.values().begin(), pu.values().end());
  for (double& v : out) v /= norm;
  return out;
}

double mean_abs(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double mean_of(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v;
  return acc / static_cast<double>(a.size());
}

}  // namespace

SdeDemoResult itm_sde_demo(const LinearImage& ldr, const LinearImage& hdr_gt,
                           const SdeSchedule& sched, const SdeDemoConfig& config) {
  sched.validate();
  config.display.validate();
  require_same_shape(ldr.shape(), hdr_gt.shape(), "itm_sde_demo");
  const PuEncoding& enc = config.encoding;
  const DisplayMapping& dm = config.display;
  const double norm = enc.encode(dm.peak_luminance);
  if (!(norm > 0.0)) throw ValidationError("itm_sde_demo: PU value of the display peak must be > 0");

  const std::vector<double> gt_state = pu_state(hdr_gt, enc, dm, norm);
  const std::vector<double> mu_state = pu_state(ldr, enc, dm, norm);
  const std::size_t dim = gt_state.size();
  const std::size_t steps = sched.steps();

  const Ensemble fwd =
      forward_simulate(gt_state, mu_state, sched, config.seed, 1, Recording::kFull, 1);
  const ScoreFn score = gaussian_score_fn(gt_state, mu_state, sched);
  std::vector<double> back_frames;
  std::vector<double> restored_state =
      backward_simulate(fwd.final_state(0), mu_state, sched, score, config.seed, 0, &back_frames);

  SdeDemoResult out{MetricReport{}, ScalarField(ldr.width(), ldr.height()), {},
                    LinearImage(ldr.width(), ldr.height()), 0.0, 0.0, {}};
  for (std::size_t k = 0; k <= steps; ++k) {
    const auto x = fwd.state(0, k);
    out.trace.push_back({"forward", k, mean_of(x), mean_abs(x, gt_state), mean_abs(x, mu_state)});
  }
  for (std::size_t k = steps + 1; k-- > 0;) {
    const std::span<const double> x(back_frames.data() + k * dim, dim);
    out.trace.push_back({"backward", k, mean_of(x), mean_abs(x, gt_state), mean_abs(x, mu_state)});
  }
  out.degraded_mae_to_mu = mean_abs(fwd.final_state(0), mu_state);
  for (std::size_t i = 0; i < dim; ++i) {
    out.restored_max_abs = std::max(out.restored_max_abs, std::abs(restored_state[i] - gt_state[i]));
  }

  // Back to relative radiance.
  std::vector<float> radiance(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double y = enc.decode(restored_state[i] * norm);
    radiance[i] = static_cast<float>(y * dm.reference_white / dm.peak_luminance);
  }
  out.restored = LinearImage(ldr.width(), ldr.height(), std::move(radiance));
  out.restored_state = std::move(restored_state);
  out.error_map = error_map(out.restored, hdr_gt, enc, dm);
  out.report.per_image.push_back(score_pair("sde-demo", out.restored, hdr_gt, enc, dm));
  return out;
}

std::string sde_trace_to_csv(const std::vector<SdeTraceRow>& trace) {
  std::ostringstream os;
  os << "phase,step,mean_state,mae_to_gt,mae_to_mu\n";
  for (const auto& r : trace) {
    os << r.phase << ',' << r.step << ',' << format_number(r.mean_state) << ','
       << format_number(r.mae_to_gt) << ',' << format_number(r.mae_to_mu) << '\n';
  }
  return os.str();
}

}  // namespace itm
