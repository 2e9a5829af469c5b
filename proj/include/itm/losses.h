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

#ifndef ITM_LOSSES_H
#define ITM_LOSSES_H

#include <optional>
#include <span>
#include <vector>

#include "itm/color_transfer.h"
#include "itm/image.h"
#include "itm/metrics.h"

namespace itm {

// Numerical floors used by the loss terms.
struct LossConstants {
  static constexpr double kCharbonnierEps = 1e-3;
  static constexpr double kLogEps = 1e-8;
  static constexpr double kColorEps = 1e-8;
};

struct LossWeights {
  double alpha_perc = 0.1;
  double gamma_ssim = 0.1;
  double gamma_color = 0.05;
  double lambda_linear = 0.1;
  double alpha_denoise = 0.1;
  double alpha_upf = 0.1;
  double gamma_tv = 0.1;

  void validate() const;
};

struct UpfParams {
  int patch = 16;
  double focal_gamma = 1.5;
  int hist_bins = 64;
  double hist_sigma = 0.1;
  double alpha_hist = 1.0;
  double beta_smooth = 0.1;

  void validate() const;
};

// sum_i (i / N) * mean |R_mu(pred_i) - R_mu(gt)|.
double recon_loss(std::span<const LinearImage> preds, const LinearImage& gt,
                  MuLawParams mu = {});

// Mean absolute difference over all components.
double linear_l1(const LinearImage& pred, const LinearImage& gt);

// Plain L1, as printed for the denoising stage.
double denoise_loss(const LinearImage& denoised, const LinearImage& gt);

// 1 - SSIM of pu_approx(luminance) with dynamic range 1. Images smaller than
// the SSIM window fall back to a single global window.
double ssim_pu_loss(const LinearImage& pred, const LinearImage& gt, PuApproxParams pu = {},
                    const SsimOptions& options = {});

// Mean L1 over the log(R/G), log(G/B), log(B/R) chrominance channels.
double color_loss(const LinearImage& pred, const LinearImage& gt,
                  double eps = LossConstants::kColorEps);

// Mean |horizontal forward difference| + mean |vertical forward difference|.
double tv_loss(const LinearImage& pred);

struct UpfBreakdown {
  double charbonnier = 0.0;
  double histogram = 0.0;
  double smoothness = 0.0;
  double total = 0.0;
};

// Operates on l = log(luminance + 1e-8).
//   charbonnier: rho(d) = sqrt(d^2 + eps^2) - eps averaged over each full,
//     non-overlapping patch (e_j); weights w_j = (e_j / mean e)^focal_gamma;
//     term = mean_j(w_j e_j).
//   histogram: both images mapped onto [0, 1] over their joint log range;
//     Gaussian votes (hist_sigma, normalized units) at hist_bins evenly
//     spaced centers on [0, 1]; histograms normalized to unit mass;
//     term = mean_k |h_pred - h_gt|.
//   smoothness: for horizontal and vertical forward differences,
//     mean(|dl_pred - dl_gt| * exp(-|dl_gt|)), summed over both axes.
// ShapeError when either side is shorter than the patch.
UpfBreakdown upf_terms(const LinearImage& pred, const LinearImage& gt, const UpfParams& p = {});
double upf_loss(const LinearImage& pred, const LinearImage& gt, const UpfParams& p = {});

struct TotalLossInputs {
  std::span<const LinearImage> stages;   // progressive outputs, last is most important
  const LinearImage* pred = nullptr;     // final output
  const LinearImage* denoised = nullptr; // defaults to pred when null
  const LinearImage* gt = nullptr;
  double perceptual = 0.0;               // externally computed L_perc
};

struct LossTerm {
  const char* name;
  double weight;
  double value;
  double contribution;  // weight * value
};

struct TotalLoss {
  std::vector<LossTerm> terms;  // fixed order, recon first
  double total = 0.0;
};

TotalLoss total_loss(const TotalLossInputs& in, const LossWeights& w = {},
                     const UpfParams& upf = {}, MuLawParams mu = {}, PuApproxParams pu = {});

// One step of a restoration trajectory: samples of the model state x and the
// target x* at that step.
struct ScoreMatchingStep {
  std::vector<ScalarField> x;
  std::vector<ScalarField> x_star;
};

// sum_i gamma_i * mean_samples(mean|x - x*| + lambda (1 - SSIM(x, x*))).
// SSIM uses dynamic_range and falls back to one global window on small states.
double score_matching_loss(std::span<const ScoreMatchingStep> trajectory,
                           std::span<const double> gammas, double lambda,
                           double dynamic_range = 1.0);

// SSIM of one window covering the whole field, Gaussian weights replaced by
// uniform ones. Used where fields are smaller than the sliding window.
double global_ssim(const ScalarField& a, const ScalarField& b, double dynamic_range,
                   const SsimOptions& options = {});

}  // namespace itm

#endif  // ITM_LOSSES_H
