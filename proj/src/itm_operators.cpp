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

#include "itm/itm_operators.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "itm/color_transfer.h"
#include "itm/error.h"

namespace itm {

std::array<double, 2> MaskParams::thresholds() const {
  const double peak = std::max(theta[0], theta[1]);
  const double e0 = std::exp(theta[0] - peak);
  const double e1 = std::exp(theta[1] - peak);
  const double tau1 = e0 / (e0 + e1);
  return {tau1, 1.0};
}

void MaskParams::validate() const {
  if (!std::isfinite(theta[0]) || !std::isfinite(theta[1])) {
    throw ValidationError("mask thresholds must be finite");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("mask alpha must be > 0");
  if (blur_kernel < 1 || blur_kernel % 2 == 0) {
    throw ValidationError("mask blur kernel must be a positive odd size");
  }
  const auto tau = thresholds();
  if (!(tau[0] > 0.0 && tau[0] < tau[1])) {
    throw ValidationError("mask thresholds must satisfy 0 < tau1 < tau2");
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ScalarField blurred_luminance(const LinearImage& img, int k) {
  if (k < 1 || k % 2 == 0) throw ValidationError("blur kernel must be a positive odd size");
  const ScalarField lum = luminance(img);
  const int w = img.width();
  const int h = img.height();
  const int r = k / 2;
  // Separable box filter with clamped (replicated) coordinates.
  ScalarField rows(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) acc += lum.at(std::clamp(x + d, 0, w - 1), y);
      rows.at(x, y) = acc / k;
    }
  }
  ScalarField out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) acc += rows.at(x, std::clamp(y + d, 0, h - 1));
      out.at(x, y) = acc / k;
    }
  }
  return out;
}

MaskTriple exposure_masks(const ScalarField& lum_blurred, const MaskParams& p) {
  p.validate();
  const auto tau = p.thresholds();
  const int w = lum_blurred.width();
  const int h = lum_blurred.height();
  MaskTriple m{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  for (std::size_t i = 0; i < lum_blurred.size(); ++i) {
    const double s1 = logistic(p.alpha * (lum_blurred[i] - tau[0]));
    const double s2 = logistic(p.alpha * (lum_blurred[i] - tau[1]));
    m.under[i] = 1.0 - s1;
    m.mid[i] = s1 - s2;
    m.over[i] = s2;
  }
  return m;
}

FusionWeights uniform_weights(Shape shape) {
  const double third = 1.0 / 3.0;
  return {ScalarField(shape.width, shape.height, third), ScalarField(shape.width, shape.height, third),
          ScalarField(shape.width, shape.height, third)};
}

FusionWeights well_exposedness_weights(const LinearImage& img, const MaskTriple& masks,
                                       double sigma) {
  if (!(sigma > 0.0)) throw DomainError("well-exposedness sigma must be > 0");
  require_same_shape(img.shape(), masks.under.shape(), "well_exposedness_weights");
  const int w = img.width();
  const int h = img.height();
  FusionWeights out{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double lum = luminance(img.pixel(i));
    const std::array<double, 3> component{lum * masks.under[i], lum * masks.mid[i],
                                          lum * masks.over[i]};
    std::array<double, 3> logit{};
    for (int c = 0; c < 3; ++c) {
      const double d = component[c] - 0.5;
      logit[c] = -(d * d) / (2.0 * sigma * sigma);
    }
    const double peak = std::max({logit[0], logit[1], logit[2]});
    double sum = 0.0;
    for (double& v : logit) sum += (v = std::exp(v - peak));
    out.under[i] = logit[0] / sum;
    out.mid[i] = logit[1] / sum;
    out.over[i] = logit[2] / sum;
  }
  return out;
}

LinearImage fuse_exposures(const LinearImage& img, const MaskTriple& masks,
                           const FusionWeights& weights) {
  for (const ScalarField* f : {&masks.under, &masks.mid, &masks.over, &weights.under,
                               &weights.mid, &weights.over}) {
    require_same_shape(img.shape(), f->shape(), "fuse_exposures");
  }
  LinearImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double wu = weights.under[i];
    const double wm = weights.mid[i];
    const double wo = weights.over[i];
    if (wu < 0.0 || wm < 0.0 || wo < 0.0 || std::abs(wu + wm + wo - 1.0) > 1e-6) {
      throw DomainError("fusion weights must lie on the simplex at pixel " + std::to_string(i));
    }
    const double gain = wu * masks.under[i] + wm * masks.mid[i] + wo * masks.over[i];
    const Rgb p = img.pixel(i);
    out.set_pixel(i, {p[0] * gain, p[1] * gain, p[2] * gain});
  }
  return out;
}

namespace {

void require_gain(double gain) {
  if (!(gain >= 0.0 && gain <= 1.0)) throw DomainError("residual gain must lie in [0, 1]");
}

Rgb project(const Rgb& p, double gain, const Rgb& r, std::size_t i) {
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = p[c] * (1.0 + gain * r[c]);
    if (!(out[c] >= 0.0) || !std::isfinite(out[c])) {
      throw DomainError("residual projection leaves the radiance domain at pixel " +
                        std::to_string(i));
    }
  }
  return out;
}

}  // namespace

LinearImage residual_project(const LinearImage& img, double gain, const ScalarField& residual) {
  require_gain(gain);
  require_same_shape(img.shape(), residual.shape(), "residual_project");
  LinearImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double r = residual[i];
    out.set_pixel(i, project(img.pixel(i), gain, {r, r, r}, i));
  }
  return out;
}

LinearImage residual_project(const LinearImage& img, double gain, const RgbField& residual) {
  require_gain(gain);
  require_same_shape(img.shape(), residual.shape(), "residual_project");
  const auto r = residual.values();
  LinearImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    out.set_pixel(i, project(img.pixel(i), gain, {r[3 * i], r[3 * i + 1], r[3 * i + 2]}, i));
  }
  return out;
}

LinearImage naive_expand(const Ldr8Image& ldr, const Crf& crf) {
  const auto src = ldr.data();
  std::vector<float> data(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    data[i] = static_cast<float>(crf.inverse(src[i] / 255.0));
  }
  return LinearImage(ldr.width(), ldr.height(), std::move(data));
}

LinearImage srgb_linearize(const Ldr8Image& ldr) {
  const auto src = ldr.data();
  std::vector<float> data(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    data[i] = static_cast<float>(srgb_to_linear(src[i] / 255.0));
  }
  return LinearImage(ldr.width(), ldr.height(), std::move(data));
}

}  // namespace itm
