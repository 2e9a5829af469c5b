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

#ifndef ITM_COLOR_TRANSFER_H
#define ITM_COLOR_TRANSFER_H

#include "itm/image.h"

namespace itm {

// Absolute-luminance mapping for relative HDR pixels.
struct DisplayMapping {
  double peak_luminance = 1000.0;  // cd/m² assigned to reference_white
  double black_floor = 0.005;      // cd/m², lower clamp before PU encoding
  double reference_white = 1.0;    // pixel value mapped to peak_luminance

  // Throws ValidationError unless 0 < black_floor < peak_luminance and
  // reference_white > 0.
  void validate() const;
};

struct MuLawParams {
  double mu = 5000.0;
};

struct PuApproxParams {
  double c = 10000.0;
};

// sRGB EOTF piecewise definition. Input must lie in [0, 1] (DomainError).
double srgb_to_linear(double v);
double linear_to_srgb(double v);

// Rec. 709 luminance weights.
inline constexpr double kLumaR = 0.2126;
inline constexpr double kLumaG = 0.7152;
inline constexpr double kLumaB = 0.0722;

double luminance(const Rgb& rgb);
ScalarField luminance(const LinearImage& image);

// log(1 + mu x) / log(1 + mu). Defined for any finite x >= 0; maps [0, 1]
// onto [0, 1].
double mu_law(double x, MuLawParams p = {});

// log10(1 + c x) / log10(1 + c); the log base cancels so this equals
// mu_law(x, {c}).
double pu_approx(double x, PuApproxParams p = {});

// Scales every component by peak / reference_white and clamps below at the
// black floor. Returns cd/m².
RgbField to_display_luminance(const LinearImage& image, const DisplayMapping& m = {});
double to_display_luminance(double v, const DisplayMapping& m = {});

}  // namespace itm

#endif  // ITM_COLOR_TRANSFER_H
