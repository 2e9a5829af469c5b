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

#include "itm/color_transfer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "itm/error.h"

namespace itm {

namespace {

constexpr double kSrgbEncodedBreak = 0.04045;
constexpr double kSrgbLinearBreak = 0.0031308;

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + ": input must lie in [0, 1], got " + std::to_string(v));
  }
}

void require_non_negative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError(std::string(what) + ": input must be finite and >= 0, got " +
                      std::to_string(v));
  }
}

}  // namespace

void DisplayMapping::validate() const {
  if (!(black_floor > 0.0 && black_floor < peak_luminance) || !std::isfinite(peak_luminance)) {
    throw ValidationError("display mapping requires 0 < black_floor < peak_luminance");
  }
  if (!(reference_white > 0.0) || !std::isfinite(reference_white)) {
    throw ValidationError("display mapping requires reference_white > 0");
  }
}

double srgb_to_linear(double v) {
  require_unit_interval(v, "srgb_to_linear");
  if (v <= kSrgbEncodedBreak) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
  require_unit_interval(v, "linear_to_srgb");
  // The breakpoint is the image of 0.04045 under the forward curve, so the
  // inverse stays exact on both branches.
  if (v <= kSrgbEncodedBreak / 12.92) return v * 12.92;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double luminance(const Rgb& rgb) { return kLumaR * rgb[0] + kLumaG * rgb[1] + kLumaB * rgb[2]; }

ScalarField luminance(const LinearImage& image) {
  ScalarField out(image.width(), image.height());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) out[i] = luminance(image.pixel(i));
  return out;
}

double mu_law(double x, MuLawParams p) {
  require_non_negative(x, "mu_law");
  if (!(p.mu > 0.0)) throw DomainError("mu_law: mu must be positive");
  return std::log1p(p.mu * x) / std::log1p(p.mu);
}

double pu_approx(double x, PuApproxParams p) {
  require_non_negative(x, "pu_approx");
  if (!(p.c > 0.0)) throw DomainError("pu_approx: c must be positive");
  return std::log10(1.0 + p.c * x) / std::log10(1.0 + p.c);
}

double to_display_luminance(double v, const DisplayMapping& m) {
  return std::max(v * (m.peak_luminance / m.reference_white), m.black_floor);
}

RgbField to_display_luminance(const LinearImage& image, const DisplayMapping& m) {
  m.validate();
  RgbField out(image.width(), image.height());
  auto dst = out.values();
  const auto src = image.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_display_luminance(src[i], m);
  return out;
}

}  // namespace itm
