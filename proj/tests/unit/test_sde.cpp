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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "itm/error.h"
#include "itm/rng.h"
#include "itm/sde.h"
#include "test_util.h"

namespace itm {
namespace {

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se = 0.0;        // standard error of the mean
};

SampleStats stats_of(const Ensemble& e, std::size_t frame) {
  SampleStats s;
  const double n = static_cast<double>(e.trajectories);
  for (std::size_t j = 0; j < e.trajectories; ++j) s.mean += e.state(j, frame)[0];
  s.mean /= n;
  for (std::size_t j = 0; j < e.trajectories; ++j) {
    const double d = e.state(j, frame)[0] - s.mean;
    s.variance += d * d;
  }
  s.variance /= n - 1;
  s.se = std::sqrt(s.variance / n);
  return s;
}

TEST(SdeScheduleTest, ConstantAndValidation) {
  const SdeSchedule s = SdeSchedule::constant(10, 1.0, 0.5, 0.01);
  EXPECT_EQ(s.steps(), 10u);
  EXPECT_THROW(SdeSchedule::constant(10, 0.0, 0.5, 0.01), ValidationError);
  EXPECT_THROW(SdeSchedule::constant(10, 1.0, -0.5, 0.01), ValidationError);
  EXPECT_THROW(SdeSchedule::constant(10, 200.0, 0.5, 0.01), ValidationError);
  EXPECT_THROW(SdeSchedule::constant(0, 1.0, 0.5, 0.01), ValidationError);
  SdeSchedule bad = s;
  bad.sigma.pop_back();
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(SdeScheduleTest, CosineConvention) {
  const double lambda = 50.0 / 255.0;
  const SdeSchedule s = SdeSchedule::cosine(100, lambda);
  EXPECT_EQ(s.steps(), 100u);
  const double total = std::accumulate(s.theta.begin(), s.theta.end(), 0.0);
  EXPECT_NEAR(std::exp(-total * s.dt), 0.01, 1e-12);
  for (std::size_t k = 0; k < s.steps(); ++k) {
    EXPECT_NEAR(s.sigma[k] * s.sigma[k], 2 * s.theta[k] * lambda * lambda, 1e-15);
    if (k > 0) EXPECT_GT(s.theta[k], s.theta[k - 1]);
  }
}

TEST(ForwardTest, FixedPoint) {
  const std::vector<double> x0{0.3, 0.3}, mu{0.3, 0.3};
  const Ensemble e = forward_simulate(x0, mu, SdeSchedule::constant(50, 1.0, 0.0, 0.01), 1, 1,
                                      Recording::kFull);
  for (std::size_t k = 0; k <= 50; ++k) {
    EXPECT_EQ(e.state(0, k)[0], 0.3);
    EXPECT_EQ(e.state(0, k)[1], 0.3);
  }
}

TEST(ForwardTest, DeterministicRecurrence) {
  const std::vector<double> x0{2.0}, mu{0.5};
  const double theta = 1.3, dt = 0.02;
  const Ensemble e = forward_simulate(x0, mu, SdeSchedule::constant(100, theta, 0.0, dt), 1, 1,
                                      Recording::kFull);
  for (std::size_t k = 0; k <= 100; ++k) {
    const double want = 0.5 + 1.5 * std::pow(1 - theta * dt, static_cast<double>(k));
    EXPECT_NEAR(e.state(0, k)[0], want, 1e-13);
  }
}

TEST(ForwardTest, MomentsMatchOrnsteinUhlenbeck) {
  const std::vector<double> x0{1.0}, mu{0.0};
  const SdeSchedule s = SdeSchedule::constant(500, 1.0, 0.5, 0.01);
  const Ensemble e = forward_simulate(x0, mu, s, 2024, 10000, Recording::kFull, 4);
  for (std::size_t k : {100u, 250u, 500u}) {
    const Moments m = ou_moments(1.0, 0.0, 1.0, 0.5, k * 0.01);
    const SampleStats st = stats_of(e, k);
    EXPECT_LE(std::abs(st.mean - m.mean), 3 * st.se) << k;
    EXPECT_LE(std::abs(st.variance - m.variance), 0.1 * m.variance) << k;
  }
}

TEST(ForwardTest, ConvergesAsStepShrinks) {
  const std::vector<double> x0{10.0}, mu{0.0};
  const Moments exact = ou_moments(10.0, 0.0, 1.0, 0.5, 1.0);
  double prev = INFINITY;
  for (double dt : {0.02, 0.01, 0.005}) {
    const auto steps = static_cast<std::size_t>(std::lround(1.0 / dt));
    const Ensemble e =
        forward_simulate(x0, mu, SdeSchedule::constant(steps, 1.0, 0.5, dt), 8, 20000);
    const double err = std::abs(stats_of(e, 0).mean - exact.mean);
    EXPECT_LT(err, prev) << dt;
    prev = err;
  }
}

TEST(ForwardTest, DimensionAgnostic) {
  const SdeSchedule s = SdeSchedule::constant(40, 0.8, 0.3, 0.05);
  const std::vector<double> x0v{1.0, 1.0, 1.0, 1.0, 1.0}, muv(5, 0.2);
  const Ensemble image = forward_simulate(x0v, muv, s, 77, 1, Recording::kFull);
  const std::vector<double> x0{1.0}, mu{0.2};
  const Ensemble scalar = forward_simulate(x0, mu, s, 77, 5, Recording::kFull);
  for (std::size_t k = 0; k <= 40; ++k)
    for (std::size_t e = 0; e < 5; ++e) EXPECT_EQ(image.state(0, k)[e], scalar.state(e, k)[0]);
}

TEST(ForwardTest, IndependentOfJobs) {
  const SdeSchedule s = SdeSchedule::constant(30, 1.0, 0.4, 0.02);
  const std::vector<double> x0{0.1, 0.9}, mu{0.5, 0.5};
  const Ensemble a = forward_simulate(x0, mu, s, 5, 64, Recording::kFinal, 1);
  const Ensemble b = forward_simulate(x0, mu, s, 5, 64, Recording::kFinal, 8);
  EXPECT_EQ(a.data, b.data);
}

TEST(BackwardTest, NoiseFreeReversesForward) {
  const SdeSchedule s = SdeSchedule::constant(200, 1.0, 0.0, 0.01);
  const std::vector<double> x0{3.0, -1.0}, mu{0.5, 0.5};
  const Ensemble f = forward_simulate(x0, mu, s, 0);
  const auto back = backward_simulate(f.final_state(0), mu, s, ScoreFn{}, 0);
  EXPECT_NEAR(back[0], 3.0, 1e-12);
  EXPECT_NEAR(back[1], -1.0, 1e-12);
}

TEST(BackwardTest, SingleStepArithmetic) {
  const SdeSchedule s = SdeSchedule::constant(1, 0.5, 0.2, 0.1);
  const std::vector<double> x1{0.8}, mu{0.3};
  const ScoreFn constant = [](const SdeState& st, std::span<double> out) {
    EXPECT_EQ(st.t, 1u);
    out[0] = 0.3;
  };
  const auto x0 = backward_simulate(x1, mu, s, constant, 11);
  const double xi = keyed_normal(derive_seed(derive_seed(derive_seed(11, "backward"), 0), 0));
  const double want = 0.3 + (0.8 - 0.3 + 0.04 * 0.3 * 0.1 + 0.2 * std::sqrt(0.1) * xi) / (1 - 0.05);
  EXPECT_NEAR(x0[0], want, 1e-15);
}

TEST(BackwardTest, GaussianScoreRecoversStartMean) {
  const double x0 = 1.0, mu = 0.0;
  const SdeSchedule s = SdeSchedule::constant(500, 1.0, 0.5, 0.01);
  const std::vector<double> x0v{x0}, muv{mu};
  const Ensemble f = forward_simulate(x0v, muv, s, 31, 10000, Recording::kFinal, 4);
  const Ensemble b = backward_ensemble(f, muv, s, gaussian_score_fn(x0v, muv, s), 32, 4);
  const SampleStats st = stats_of(b, 0);
  EXPECT_LE(std::abs(st.mean - x0), 3 * st.se);
}

TEST(BackwardTest, ScoreErrorsSurface) {
  const SdeSchedule s = SdeSchedule::constant(3, 1.0, 0.5, 0.01);
  const std::vector<double> x{0.5}, mu{0.0};
  const ScoreFn degenerate = [](const SdeState& st, std::span<double> out) {
    out[0] = gaussian_score(st.x[0], 0.0, 0.0);
  };
  EXPECT_THROW(backward_simulate(x, mu, s, degenerate, 0), NumericError);
  const ScoreFn exploding = [](const SdeState&, std::span<double> out) { out[0] = INFINITY; };
  EXPECT_THROW(backward_simulate(x, mu, s, exploding, 0), NumericError);
  EXPECT_THROW(backward_simulate(x, mu, s, ScoreFn{}, 0), ValidationError);
}

TEST(OuTest, Moments) {
  const Moments zero = ou_moments(2.0, 0.5, 1.0, 1.0, 0.0);
  EXPECT_EQ(zero.mean, 2.0);
  EXPECT_EQ(zero.variance, 0.0);
  const Moments inf = ou_moments(2.0, 0.5, 1.0, 1.0, 1e3);
  EXPECT_NEAR(inf.mean, 0.5, 1e-12);
  EXPECT_NEAR(inf.variance, 0.5, 1e-12);
  const Moments one = ou_moments(2.0, 0.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(one.mean, 2 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(one.variance, (1 - std::exp(-2.0)) / 2, 1e-15);
}

TEST(OuTest, DiscreteMomentsConverge) {
  const auto m = discrete_moments(1.0, 0.0, SdeSchedule::constant(10000, 1.0, 0.5, 1e-4));
  const Moments exact = ou_moments(1.0, 0.0, 1.0, 0.5, 1.0);
  EXPECT_NEAR(m.back().mean, exact.mean, 1e-4);
  EXPECT_NEAR(m.back().variance, exact.variance, 1e-4);
}

TEST(OuTest, BridgeMeanMatchesGaussianConditioning) {
  const double theta = 0.9, mu = 0.2, x0 = 1.5;
  for (double sigma : {0.3, 1.7}) {
    for (auto [a, b, xb] : {std::tuple{0.3, 0.5, 0.7}, std::tuple{1.0, 1.1, -0.2}}) {
      const Moments ma = ou_moments(x0, mu, theta, sigma, a);
      const Moments mb = ou_moments(x0, mu, theta, sigma, b);
      const double cov = ma.variance * std::exp(-theta * (b - a));
      const double want = ma.mean + cov / mb.variance * (xb - mb.mean);
      EXPECT_NEAR(ou_bridge_mean(xb, x0, mu, theta, a, b), want, 1e-12);
    }
  }
  EXPECT_NEAR(ou_bridge_mean(0.7, x0, mu, theta, 0.0, 0.5), x0, 1e-12);
  EXPECT_THROW(ou_bridge_mean(0.7, x0, mu, theta, 0.5, 0.5), DomainError);
}

TEST(SdeDemoTest, ZeroNoiseRecoversGroundTruth) {
  const LinearImage gt = test::random_hdr(8, 8, 1, -6, 2);
  const LinearImage ldr = test::random_image(8, 8, 2);
  const auto r = itm_sde_demo(ldr, gt, SdeSchedule::cosine(100, 0.0));
  EXPECT_LE(r.restored_max_abs, 1e-6);
  EXPECT_EQ(r.error_map.shape(), gt.shape());
  EXPECT_GT(r.degraded_mae_to_mu, 0.0);
  EXPECT_EQ(r.trace.size(), 2 * 101u);
}

TEST(SdeDemoTest, SeededRunIsReproducible) {
  const LinearImage gt = test::random_hdr(8, 8, 3, -6, 2);
  const LinearImage ldr = test::random_image(8, 8, 4);
  SdeDemoConfig cfg;
  cfg.seed = 19;
  const auto a = itm_sde_demo(ldr, gt, SdeSchedule::cosine(), cfg);
  const auto b = itm_sde_demo(ldr, gt, SdeSchedule::cosine(), cfg);
  EXPECT_EQ(a.restored_state, b.restored_state);
  EXPECT_EQ(sde_trace_to_csv(a.trace), sde_trace_to_csv(b.trace));
  cfg.seed = 20;
  EXPECT_NE(itm_sde_demo(ldr, gt, SdeSchedule::cosine(), cfg).restored_state, a.restored_state);
}

}  // namespace
}  // namespace itm
