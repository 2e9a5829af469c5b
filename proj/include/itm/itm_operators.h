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

#ifndef ITM_OPERATORS_H
#define ITM_OPERATORS_H

#include <array>
#include <optional>

#include "itm/camera_sim.h"
#include "itm/image.h"

namespace itm {

// Exposure-mask decomposition with fixed (non-learned) parameters.
struct MaskParams {
  std::array<double, 2> theta{0.0, 0.0};  // threshold logits
  double alpha = 10.0;                    // sigmoid sharpness
  int blur_kernel = 5;                    // odd box-filter side

  // tau = cumsum(softmax(theta)). The second entry is always 1.
  std::array<double, 2> thresholds() const;
  void validate() const;
};

struct MaskTriple {
  ScalarField under;
  ScalarField mid;
  ScalarField over;
};

double logistic(double x);

// Box filter of side k over luminance(img), edges replicated.
ScalarField blurred_luminance(const LinearImage& img, int k);

//   under = 1 - s(alpha (L - tau1))
//   mid   = s(alpha (L - tau1)) - s(alpha (L - tau2))
//   over  = s(alpha (L - tau2))
MaskTriple exposure_masks(const ScalarField& lum_blurred, const MaskParams& p = {});

// Per-pixel fusion weights for the under/mid/over components; must sum to 1.
struct FusionWeights {
  ScalarField under;
  ScalarField mid;
  ScalarField over;
};

FusionWeights uniform_weights(Shape shape);

// softmax over the three components of -(L(x_i) - 0.5)^2 / (2 sigma^2), where
// L(x_i) is the luminance of the masked image img * m_i.
FusionWeights well_exposedness_weights(const LinearImage& img, const MaskTriple& masks,
                                       double sigma = 0.2);

// sum_i w_i * (img * m_i). Weights off the simplex (tolerance 1e-6) are a
// DomainError.
LinearImage fuse_exposures(const LinearImage& img, const MaskTriple& masks,
                           const FusionWeights& weights);

// img * (1 + gain * residual). gain in [0, 1]. The residual is per pixel or
// per component; a result below zero is a DomainError.
LinearImage residual_project(const LinearImage& img, double gain, const ScalarField& residual);
LinearImage residual_project(const LinearImage& img, double gain, const RgbField& residual);

// Dequantize v / 255 and undo the CRF. Output is relative linear radiance in
// [0, 1]; display mapping is left to scoring.
LinearImage naive_expand(const Ldr8Image& ldr, const Crf& crf);

// sRGB decode of an 8-bit image followed by nothing else.
LinearImage srgb_linearize(const Ldr8Image& ldr);

}  // namespace itm

#endif  // ITM_OPERATORS_H
