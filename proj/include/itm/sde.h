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

#ifndef ITM_SDE_H
#define ITM_SDE_H

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "itm/color_transfer.h"
#include "itm/image.h"
#include "itm/pu21.h"
#include "itm/scoring.h"

namespace itm {

// Discretized mean-reverting SDE  dx = theta_t (mu - x) dt + sigma_t dw.
// Step k moves x_k to x_{k+1} with theta[k], sigma[k].
struct SdeSchedule {
  std::vector<double> theta;  // > 0
  std::vector<double> sigma;  // >= 0
  double dt = 0.0;

  std::size_t steps() const { return theta.size(); }

  static SdeSchedule constant(std::size_t steps, double theta, double sigma, double dt);

  // Cosine theta schedule (offset s = 0.008) with sigma_t^2 = 2 theta_t
  // lambda^2, so the stationary standard deviation is lambda, and dt chosen
  // so that exp(-sum theta dt) = 0.01.
  static SdeSchedule cosine(std::size_t steps = 100, double lambda = 50.0 / 255.0);

  // Equal lengths, at least one step, theta > 0, sigma >= 0, dt > 0 and
  // theta dt < 1 (the backward step divides by 1 - theta dt).
  void validate() const;
};

// View of the state handed to a score function. t is the step index of x.
struct SdeState {
  std::span<const double> x;
  std::span<const double> mu;
  std::size_t t = 0;
};

// Writes grad_x log p_t(x) into `score` (same length as x). Must be safe to
// call concurrently.
using ScoreFn = std::function<void(const SdeState& state, std::span<double> score)>;

enum class Recording { kFinal, kFull };

struct Ensemble {
  std::size_t trajectories = 0;
  std::size_t dim = 0;
  std::size_t frames = 0;     // 1 for kFinal, steps + 1 for kFull
  std::vector<double> data;   // [trajectory][frame][element]

  std::span<const double> state(std::size_t trajectory, std::size_t frame) const {
    return std::span<const double>(data).subspan((trajectory * frames + frame) * dim, dim);
  }
  std::span<const double> final_state(std::size_t trajectory) const {
    return state(trajectory, frames - 1);
  }
};

// Euler-Maruyama:
//   x_{k+1} = x_k + theta_k (mu - x_k) dt + sigma_k sqrt(dt) xi.
// xi for (trajectory j, element e, step k) is keyed on (seed, j * dim + e, k),
// so a scalar ensemble of n trajectories reproduces the elements of one
// n-dimensional trajectory.
Ensemble forward_simulate(std::span<const double> x0, std::span<const double> mu,
                          const SdeSchedule& sched, std::uint64_t seed,
                          std::size_t n_traj = 1, Recording recording = Recording::kFinal,
                          int jobs = 1);

// Reverse-time step for k = T-1 .. 0 with the drift
// theta_k (mu - x) - sigma_k^2 score(x_{k+1}, k+1), taken semi-implicitly in
// the mean-reversion term:
//   x_k = mu + (x_{k+1} - mu + sigma_k^2 score dt + sigma_k sqrt(dt) xi)
//              / (1 - theta_k dt)
// With sigma = 0 this inverts the forward recurrence exactly. The score is
// only evaluated when sigma_k > 0. `trajectory` selects the noise stream.
std::vector<double> backward_simulate(std::span<const double> xT, std::span<const double> mu,
                                      const SdeSchedule& sched, const ScoreFn& score_fn,
                                      std::uint64_t seed, std::size_t trajectory = 0,
                                      std::vector<double>* record = nullptr);

// Runs backward_simulate on every final state of `forward`.
Ensemble backward_ensemble(const Ensemble& forward, std::span<const double> mu,
                           const SdeSchedule& sched, const ScoreFn& score_fn,
                           std::uint64_t seed, int jobs = 1);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Closed-form OU marginal for constant coefficients started at x0.
Moments ou_moments(double x0, double mu, double theta, double sigma, double t);

// Exact moments of the Euler-Maruyama chain started at x0:
//   m_{k+1} = m_k + theta_k (mu - m_k) dt
//   v_{k+1} = (1 - theta_k dt)^2 v_k + sigma_k^2 dt
// Entry k is the marginal of x_k, k = 0 .. T.
std::vector<Moments> discrete_moments(double x0, double mu, const SdeSchedule& sched);

// -(x - m) / v. NumericError when v <= 0 or non-finite.
double gaussian_score(double x, double m, double v);

// Posterior mean of x_{t_prev} given x_t and x0 for the constant-theta OU
// process (the bridge mean; independent of sigma).
double ou_bridge_mean(double x_t, double x0, double mu, double theta, double t_prev, double t);

// Score function built from per-element discrete moments started at x0.
// Elements share mu only through the state.
ScoreFn gaussian_score_fn(std::span<const double> x0, std::span<const double> mu,
                          const SdeSchedule& sched);

////////////////////////////////////////////////////////////////////////////////
// Demo: degrade a PU-encoded ground truth toward the PU-encoded LDR input and
// restore it with the analytic Gaussian score. A diagnostic of the SDE
// machinery; the score knows the ground truth.

struct SdeDemoConfig {
  PuEncoding encoding = PuEncoding::banding_glare();
  DisplayMapping display;
  std::uint64_t seed = 0;
};

struct SdeTraceRow {
  std::string phase;  // "forward" or "backward"
  std::size_t step = 0;
  double mean_state = 0.0;
  double mae_to_gt = 0.0;    // PU state units
  double mae_to_mu = 0.0;
};

struct SdeDemoResult {
  MetricReport report;             // one row, "sde-demo"
  ScalarField error_map;           // |PU(restored) - PU(gt)| on luminance
  std::vector<double> restored_state;  // normalized PU units, interleaved RGB
  LinearImage restored;
  double degraded_mae_to_mu = 0.0;  // after the forward pass
  double restored_max_abs = 0.0;    // max |restored_state - gt_state|
  std::vector<SdeTraceRow> trace;
};

// Both images are relative linear radiance of equal shape. States are the
// per-component PU values divided by PU(peak luminance).
SdeDemoResult itm_sde_demo(const LinearImage& ldr, const LinearImage& hdr_gt,
                           const SdeSchedule& sched, const SdeDemoConfig& config = {});

std::string sde_trace_to_csv(const std::vector<SdeTraceRow>& trace);

}  // namespace itm

#endif  // ITM_SDE_H
