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

#ifndef ITM_METRICS_H
#define ITM_METRICS_H

#include "itm/color_transfer.h"
#include "itm/image.h"
#include "itm/pu21.h"

namespace itm {

// Every RGB component display-mapped, then PU-encoded.
RgbField pu_encode_image(const LinearImage& image, const PuEncoding& enc,
                         const DisplayMapping& dm = {});

// Luminance of the display-mapped pixel, PU-encoded.
ScalarField pu_encode_luminance(const LinearImage& image, const PuEncoding& enc,
                                const DisplayMapping& dm = {});

// PSNR over all PU-encoded RGB components against the PU value of the display
// peak. Identical inputs return +infinity.
double pu_psnr(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
               const DisplayMapping& dm = {});

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean SSIM over all window positions fully inside the field ("valid"
// filtering) with a normalized Gaussian window. dynamic_range is L in
// C1 = (k1 L)^2, C2 = (k2 L)^2. ShapeError when a side is shorter than the
// window.
double ssim_index(const ScalarField& a, const ScalarField& b, double dynamic_range,
                  const SsimOptions& options = {});

// Per-position SSIM values, (W - window + 1) x (H - window + 1).
ScalarField ssim_map(const ScalarField& a, const ScalarField& b, double dynamic_range,
                     const SsimOptions& options = {});

// SSIM of PU-encoded luminance with L = encode(peak_luminance).
double pu_ssim(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
               const DisplayMapping& dm = {}, const SsimOptions& options = {});

double rmse_linear(const LinearImage& pred, const LinearImage& gt);

}  // namespace itm

#endif  // ITM_METRICS_H
