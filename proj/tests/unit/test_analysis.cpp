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

#include <algorithm>
#include <cmath>

#include "itm/analysis.h"
#include "itm/error.h"
#include "oracles.h"
#include "test_util.h"

namespace itm {
namespace {

TEST(ErrorMapTest, IdenticalAndSymmetric) {
  const PuEncoding enc = PuEncoding::banding_glare();
  const LinearImage a = test::random_hdr(6, 5, 1);
  const LinearImage b = test::random_hdr(6, 5, 2);
  const ScalarField zero = error_map(a, a, enc);
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(error_map(a, b, enc), error_map(b, a, enc));
}

TEST(ErrorMapTest, HandFixture) {
  const PuEncoding enc = PuEncoding::banding_glare();
  LinearImage a(2, 2), b(2, 2);
  a.set(0, 0, {1, 1, 1});
  a.set(1, 0, {0.1, 0.1, 0.1});
  a.set(0, 1, {0, 0, 0});
  a.set(1, 1, {0.5, 0.2, 0.1});
  b.set(0, 0, {0.5, 0.5, 0.5});
  b.set(1, 0, {0.1, 0.1, 0.1});
  b.set(0, 1, {0.001, 0.001, 0.001});
  b.set(1, 1, {0.1, 0.2, 0.5});
  const ScalarField e = error_map(a, b, enc);
  auto pu_lum = [&](const Rgb& p) {
    return oracle::pu(oracle::luma(std::max(p[0] * 1000, 0.005), std::max(p[1] * 1000, 0.005),
                                   std::max(p[2] * 1000, 0.005)),
                      enc.coefficients, 0.005, 10000);
  };
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(e[i], std::abs(pu_lum(a.pixel(i)) - pu_lum(b.pixel(i))), 1e-9) << i;
  }
  EXPECT_EQ(e[1], 0.0);
}

Ldr8Image ramp100() {
  Ldr8Image img(10, 10);
  for (int i = 0; i < 100; ++i) {
    const auto v = static_cast<std::uint8_t>(i * 2);
    img.set(i % 10, i / 10, {v, v, v});
  }
  return img;
}

TEST(SaturationSplitTest, Examples) {
  Ldr8Image flat(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) flat.set(x, y, {90, 90, 90});
  EXPECT_EQ(saturation_split(flat).saturated_count(), 25u);
  const SaturationSplit r = saturation_split(ramp100(), 0.85);
  EXPECT_EQ(r.saturated_count(), 15u);
  EXPECT_DOUBLE_EQ(r.frac, 0.15);
  EXPECT_EQ(saturation_split(ramp100(), 0.0).saturated_count(), 100u);
  EXPECT_EQ(saturation_split(ramp100(), 1.0).saturated_count(), 1u);
  EXPECT_THROW(saturation_split(ramp100(), 1.5), DomainError);
}

TEST(SaturationSplitTest, FractionNearRequestedOnDistinctValues) {
  const Ldr8Image img = test::random_ldr(40, 30, 5);
  const SaturationSplit s = saturation_split(img, 0.85);
  const double n = 1200;
  EXPECT_GE(s.frac, 0.15 - 1 / n - 1e-12);
  // ties can only grow the mask
  const ScalarField l = ldr_luminance(img);
  std::vector<double> lum(l.values().begin(), l.values().end());
  std::sort(lum.begin(), lum.end());
  const auto ties = std::count(lum.begin(), lum.end(), s.threshold);
  EXPECT_LE(s.frac, 0.15 + ties / n + 1e-12);
}

TEST(SaturationSplitTest, ThresholdPermutationInvariant) {
  const Ldr8Image img = test::random_ldr(16, 8, 6);
  Ldr8Image rev(16, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) rev.set(15 - x, 7 - y, img.at(x, y));
  EXPECT_EQ(saturation_split(img).threshold, saturation_split(rev).threshold);
}

TEST(ErrorStatsTest, ZeroMap) {
  const ErrorStats s = error_stats(ScalarField(10, 10), saturation_split(ramp100()));
  EXPECT_EQ(s.saturated.count, 15u);
  EXPECT_EQ(s.non_saturated.count, 85u);
  EXPECT_EQ(s.saturated.mean, 0.0);
  EXPECT_EQ(s.non_saturated.p95, 0.0);
  EXPECT_EQ(s.histogram.counts[0], 100u);
  EXPECT_EQ(s.histogram.counts.size(), 64u);
  EXPECT_EQ(s.histogram.edges.size(), 65u);
}

TEST(ErrorStatsTest, TwoRegionFixture) {
  // Saturated pixels (indices 85..99) carry error 2 + (i - 85) / 10,
  // the rest carry error 0.5.
  ScalarField err(10, 10, 0.5);
  for (int i = 85; i < 100; ++i) err[i] = 2.0 + (i - 85) / 10.0;
  const ErrorStats s = error_stats(err, saturation_split(ramp100()));
  EXPECT_NEAR(s.saturated.mean, 2.7, 1e-12);
  EXPECT_NEAR(s.saturated.p50, 2.7, 1e-12);   // rank ceil(7.5) = 8 -> 2.7
  EXPECT_NEAR(s.saturated.p95, 3.4, 1e-12);   // rank ceil(14.25) = 15 -> 3.4
  EXPECT_EQ(s.non_saturated.mean, 0.5);
  EXPECT_EQ(s.non_saturated.p95, 0.5);
  std::size_t total = 0;
  for (auto c : s.histogram.counts) total += c;
  EXPECT_EQ(total, 100u);
  EXPECT_EQ(s.histogram.counts.back(), 1u);  // the maximum lands in the last bin
  EXPECT_DOUBLE_EQ(s.histogram.edges.back(), 3.4);
}

TEST(ErrorStatsTest, MaskSizeMismatch) {
  EXPECT_THROW(error_stats(ScalarField(3, 3), saturation_split(ramp100())), ShapeError);
}

TEST(JointHistogramTest, ZeroErrors) {
  const JointHistogram h = intensity_error_joint(ramp100(), ScalarField(10, 10), 8);
  EXPECT_EQ(h.total(), 100u);
  for (int i = 0; i < 8; ++i)
    for (int e = 1; e < 8; ++e) EXPECT_EQ(h.at(i, e), 0u);
}

TEST(JointHistogramTest, MatchesBruteForce) {
  const Ldr8Image img = test::random_ldr(13, 11, 9);
  ScalarField err(13, 11);
  RandomStream rng(3);
  for (double& v : err.values()) v = rng.uniform(0, 5);
  const int bins = 7;
  const JointHistogram h = intensity_error_joint(img, err, bins);
  double hi = 0;
  for (double v : err.values()) hi = std::max(hi, v);
  std::vector<std::size_t> want(bins * bins, 0);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 13; ++x) {
      const auto p = img.at(x, y);
      const double lum = oracle::luma(p[0] / 255.0, p[1] / 255.0, p[2] / 255.0);
      int bi = 0, be = 0;
      while (bi + 1 < bins && lum >= (bi + 1) / double(bins)) ++bi;
      while (be + 1 < bins && err.at(x, y) >= hi * (be + 1) / bins) ++be;
      ++want[bi * bins + be];
    }
  }
  EXPECT_EQ(h.counts, want);
  EXPECT_EQ(h.total(), 143u);
}

}  // namespace
}  // namespace itm
