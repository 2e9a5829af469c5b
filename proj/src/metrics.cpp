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

#include "itm/metrics.h"

#include <cmath>
#include <limits>
#include <vector>

#include "itm/error.h"

namespace itm {

namespace {

std::vector<double> gaussian_window(const SsimOptions& options) {
  if (options.window < 1 || options.window % 2 == 0) {
    throw ValidationError("SSIM window must be a positive odd size");
  }
  std::vector<double> w(static_cast<std::size_t>(options.window));
  const int half = options.window / 2;
  double sum = 0.0;
  for (int i = 0; i < options.window; ++i) {
    const double d = i - half;
    w[i] = std::exp(-(d * d) / (2.0 * options.sigma * options.sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering: rows first, then columns.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height,
                                 const std::vector<double>& w) {
  const int k = static_cast<int>(w.size());
  const int out_w = width - k + 1;
  const int out_h = height - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(out_w) * height);
  for (int y = 0; y < height; ++y) {
    const double* line = &src[static_cast<std::size_t>(y) * width];
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += w[i] * line[x + i];
      rows[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += w[i] * rows[static_cast<std::size_t>(y + i) * out_w + x];
      out[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  }
  return out;
}

}  // namespace

RgbField pu_encode_image(const LinearImage& image, const PuEncoding& enc, const DisplayMapping& dm) {
  RgbField out = to_display_luminance(image, dm);
  for (double& v : out.values()) v = enc.encode(v);
  return out;
}

ScalarField pu_encode_luminance(const LinearImage& image, const PuEncoding& enc,
                                const DisplayMapping& dm) {
  const RgbField display = to_display_luminance(image, dm);
  const auto v = display.values();
  ScalarField out(image.width(), image.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = enc.encode(luminance({v[3 * i], v[3 * i + 1], v[3 * i + 2]}));
  }
  return out;
}

double pu_psnr(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
               const DisplayMapping& dm) {
  require_same_shape(pred.shape(), gt.shape(), "pu_psnr");
  const RgbField a = pu_encode_image(pred, enc, dm);
  const RgbField b = pu_encode_image(gt, enc, dm);
  double sum = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(av.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = enc.encode(dm.peak_luminance);
  return 20.0 * std::log10(peak / std::sqrt(mse));
}

ScalarField ssim_map(const ScalarField& a, const ScalarField& b, double dynamic_range,
                     const SsimOptions& options) {
  require_same_shape(a.shape(), b.shape(), "ssim");
  if (a.width() < options.window || a.height() < options.window) {
    throw ShapeError("ssim: image " + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + " is smaller than the " +
                     std::to_string(options.window) + "x" + std::to_string(options.window) +
                     " window");
  }
  const std::vector<double> w = gaussian_window(options);
  const int width = a.width();
  const int height = a.height();
  const std::size_t n = a.size();
  std::vector<double> x(a.values().begin(), a.values().end());
  std::vector<double> y(b.values().begin(), b.values().end());
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter_valid(x, width, height, w);
  const auto mu_y = filter_valid(y, width, height, w);
  const auto e_xx = filter_valid(xx, width, height, w);
  const auto e_yy = filter_valid(yy, width, height, w);
  const auto e_xy = filter_valid(xy, width, height, w);

  const double c1 = (options.k1 * dynamic_range) * (options.k1 * dynamic_range);
  const double c2 = (options.k2 * dynamic_range) * (options.k2 * dynamic_range);
  const int out_w = width - options.window + 1;
  const int out_h = height - options.window + 1;
  ScalarField out(out_w, out_h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double var_x = e_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = e_yy[i] - mu_y[i] * mu_y[i];
    const double cov = e_xy[i] - mu_x[i] * mu_y[i];
    out[i] = ((2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2)) /
             ((mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2));
  }
  return out;
}

double ssim_index(const ScalarField& a, const ScalarField& b, double dynamic_range,
                  const SsimOptions& options) {
  const ScalarField map = ssim_map(a, b, dynamic_range, options);
  double sum = 0.0;
  for (double v : map.values()) sum += v;
  return sum / static_cast<double>(map.size());
}

double pu_ssim(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
               const DisplayMapping& dm, const SsimOptions& options) {
  require_same_shape(pred.shape(), gt.shape(), "pu_ssim");
  return ssim_index(pu_encode_luminance(pred, enc, dm), pu_encode_luminance(gt, enc, dm),
                    enc.encode(dm.peak_luminance), options);
}

double rmse_linear(const LinearImage& pred, const LinearImage& gt) {
  require_same_shape(pred.shape(), gt.shape(), "rmse_linear");
  const auto a = pred.data();
  const auto b = gt.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

}  // namespace itm
