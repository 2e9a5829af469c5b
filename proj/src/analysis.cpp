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

#include "itm/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itm/error.h"
#include "itm/metrics.h"

namespace itm {

namespace {

double nearest_rank(const std::vector<double>& sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p * n - 1e-9)));
  return sorted[std::min(rank, sorted.size()) - 1];
}

RegionStats region_stats(std::vector<double> values) {
  RegionStats s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.p50 = nearest_rank(values, 0.50);
  s.p95 = nearest_rank(values, 0.95);
  return s;
}

std::vector<double> linear_edges(double hi, int bins) {
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) edges[k] = hi * static_cast<double>(k) / bins;
  return edges;
}

int bin_of(double v, double hi, int bins) {
  if (!(hi > 0.0)) return 0;
  const auto b = static_cast<int>(std::floor(v / hi * bins));
  return std::clamp(b, 0, bins - 1);
}

double max_error(const ScalarField& errors) {
  double hi = 0.0;
  for (double v : errors.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("error map values must be finite and >= 0");
    hi = std::max(hi, v);
  }
  return hi;
}

}  // namespace

ScalarField error_map(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
                      const DisplayMapping& dm) {
  require_same_shape(pred.shape(), gt.shape(), "error_map");
  ScalarField a = pu_encode_luminance(pred, enc, dm);
  const ScalarField b = pu_encode_luminance(gt, enc, dm);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(a[i] - b[i]);
  return a;
}

ScalarField ldr_luminance(const Ldr8Image& ldr) {
  const auto d = ldr.data();
  ScalarField out(ldr.width(), ldr.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = luminance(Rgb{d[3 * i] / 255.0, d[3 * i + 1] / 255.0, d[3 * i + 2] / 255.0});
  }
  return out;
}

std::size_t SaturationSplit::saturated_count() const {
  return static_cast<std::size_t>(std::count(saturated_mask.begin(), saturated_mask.end(), 1));
}

SaturationSplit saturation_split(const Ldr8Image& ldr_input, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("saturation quantile must lie in [0, 1]");
  const ScalarField lum = ldr_luminance(ldr_input);
  std::vector<double> sorted(lum.values().begin(), lum.values().end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto rank = std::min(static_cast<std::size_t>(std::floor(q * n + 1e-9)), n - 1);

  SaturationSplit split;
  split.threshold = sorted[rank];
  split.saturated_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) split.saturated_mask[i] = lum[i] >= split.threshold ? 1 : 0;
  split.frac = static_cast<double>(split.saturated_count()) / static_cast<double>(n);
  return split;
}

ErrorStats error_stats(const ScalarField& errors, const SaturationSplit& split) {
  if (split.saturated_mask.size() != errors.size()) {
    throw ShapeError("error_stats: mask and error map sizes differ");
  }
  const double hi = max_error(errors);
  std::vector<double> sat, rest;
  ErrorStats out;
  out.histogram.edges = linear_edges(hi, kErrorHistogramBins);
  out.histogram.counts.assign(kErrorHistogramBins, 0);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    (split.saturated_mask[i] ? sat : rest).push_back(errors[i]);
    ++out.histogram.counts[bin_of(errors[i], hi, kErrorHistogramBins)];
  }
  out.saturated = region_stats(std::move(sat));
  out.non_saturated = region_stats(std::move(rest));
  return out;
}

std::size_t JointHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

JointHistogram intensity_error_joint(const Ldr8Image& ldr_input, const ScalarField& errors,
                                     int bins) {
  if (bins < 1) throw ValidationError("joint histogram needs at least one bin");
  require_same_shape(ldr_input.shape(), errors.shape(), "intensity_error_joint");
  const ScalarField lum = ldr_luminance(ldr_input);
  const double hi = max_error(errors);
  JointHistogram h;
  h.intensity_bins = bins;
  h.error_bins = bins;
  h.intensity_edges = linear_edges(1.0, bins);
  h.error_edges = linear_edges(hi, bins);
  h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const int bi = bin_of(lum[i], 1.0, bins);
    const int be = bin_of(errors[i], hi, bins);
    ++h.counts[static_cast<std::size_t>(bi) * bins + be];
  }
  return h;
}

}  // namespace itm
