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
#include <fstream>
#include <nlohmann/json.hpp>

#include "itm/color_transfer.h"
#include "itm/error.h"
#include "itm/metrics.h"
#include "itm/pu21.h"
#include "oracles.h"
#include "test_util.h"

namespace itm {
namespace {

TEST(SrgbTest, Endpoints) {
  EXPECT_EQ(srgb_to_linear(0.0), 0.0);
  EXPECT_NEAR(srgb_to_linear(1.0), 1.0, 1e-15);
  EXPECT_EQ(linear_to_srgb(0.0), 0.0);
}

TEST(SrgbTest, Breakpoints) {
  EXPECT_NEAR(srgb_to_linear(0.04045), 0.0031308, 1e-6);
  EXPECT_NEAR(linear_to_srgb(0.0031308), 0.04045, 1e-5);
  // continuity of both branches at the breakpoint
  const double upper = std::pow((0.04045 + 0.055) / 1.055, 2.4);
  EXPECT_NEAR(0.04045 / 12.92, upper, 1e-5);
}

TEST(SrgbTest, RoundTripOnGrid) {
  for (int i = 0; i < 1024; ++i) {
    const double x = i / 1023.0;
    EXPECT_NEAR(linear_to_srgb(srgb_to_linear(x)), x, 1e-6);
  }
}

TEST(SrgbTest, StrictlyMonotone) {
  double prev = -1.0, prev_inv = -1.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = i / 20000.0;
    const double v = srgb_to_linear(x);
    const double w = linear_to_srgb(x);
    EXPECT_GT(v, prev);
    EXPECT_GT(w, prev_inv);
    prev = v;
    prev_inv = w;
  }
}

TEST(SrgbTest, DomainErrors) {
  EXPECT_THROW(srgb_to_linear(-0.01), DomainError);
  EXPECT_THROW(srgb_to_linear(1.01), DomainError);
  EXPECT_THROW(linear_to_srgb(std::nan("")), DomainError);
}

TEST(LuminanceTest, Weights) {
  EXPECT_NEAR(luminance(Rgb{1, 1, 1}), 1.0, 1e-7);
  EXPECT_DOUBLE_EQ(luminance(Rgb{1, 0, 0}), 0.2126);
  EXPECT_DOUBLE_EQ(luminance(Rgb{0, 0.5, 0}), 0.3576);
  const ScalarField f = luminance(LinearImage::filled(2, 3, {0, 0, 1}));
  for (double v : f.values()) EXPECT_DOUBLE_EQ(v, 0.0722);
}

TEST(MuLawTest, Values) {
  EXPECT_EQ(mu_law(0.0), 0.0);
  EXPECT_NEAR(mu_law(1.0), 1.0, 1e-15);
  EXPECT_NEAR(mu_law(0.5), std::log(2501.0) / std::log(5001.0), 1e-15);
  EXPECT_NEAR(mu_law(0.5), 0.91864, 1e-5);
  EXPECT_NEAR(pu_approx(0.5), std::log(5001.0) / std::log(10001.0), 1e-15);
  EXPECT_NEAR(pu_approx(0.5), 0.92471, 1e-4);
  EXPECT_EQ(pu_approx(0.0), 0.0);
}

TEST(MuLawTest, PuApproxEqualsMuLawWithSameConstant) {
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    for (double c : {10.0, 5000.0, 10000.0}) {
      EXPECT_NEAR(pu_approx(x, {c}), mu_law(x, {c}), 1e-12);
    }
  }
}

TEST(MuLawTest, StrictlyMonotone) {
  double prev = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double v = mu_law(i / 10000.0);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(MuLawTest, DomainErrors) {
  EXPECT_THROW(mu_law(-0.1), DomainError);
  EXPECT_THROW(mu_law(INFINITY), DomainError);
  EXPECT_THROW(mu_law(0.5, {0.0}), DomainError);
}

TEST(DisplayMappingTest, Examples) {
  EXPECT_DOUBLE_EQ(to_display_luminance(1.0), 1000.0);
  EXPECT_DOUBLE_EQ(to_display_luminance(0.0), 0.005);
  EXPECT_DOUBLE_EQ(to_display_luminance(0.5), 500.0);
  DisplayMapping m;
  m.reference_white = 4.0;
  EXPECT_DOUBLE_EQ(to_display_luminance(2.0, m), 500.0);
  const RgbField f = to_display_luminance(LinearImage::filled(1, 1, {1, 0, 0.5}));
  EXPECT_EQ(f.values()[0], 1000.0);
  EXPECT_EQ(f.values()[1], 0.005);
  EXPECT_EQ(f.values()[2], 500.0);
}

TEST(DisplayMappingTest, Validation) {
  DisplayMapping m;
  m.black_floor = 0.0;
  EXPECT_THROW(m.validate(), ValidationError);
  m = {};
  m.black_floor = 2000.0;
  EXPECT_THROW(m.validate(), ValidationError);
  m = {};
  m.reference_white = -1.0;
  EXPECT_THROW(m.validate(), ValidationError);
}

////////////////////////////////////////////////////////////////////////////////

TEST(Pu21Test, AnchoredAndMonotone) {
  for (const char* name : {"banding", "banding_glare", "peaks", "peaks_glare"}) {
    const PuEncoding enc = PuEncoding::named(name);
    EXPECT_NO_THROW(enc.validate()) << name;
    EXPECT_NEAR(enc.encode(enc.y_min), 0.0, 1e-3) << name;
  }
}

TEST(Pu21Test, CommittedFilesMatchBuiltins) {
  for (const char* name : {"banding", "banding_glare", "peaks", "peaks_glare"}) {
    const PuEncoding file =
        load_pu_encoding(std::string(ITM_DATA_DIR) + "/pu21/" + name + ".json");
    const PuEncoding builtin = PuEncoding::named(name);
    EXPECT_EQ(file.coefficients, builtin.coefficients) << name;
    EXPECT_EQ(file.variant, name);
  }
}

TEST(Pu21Test, GoldenValues) {
  std::ifstream in(std::string(ITM_TEST_DATA_DIR) + "/pu21_golden.json");
  ASSERT_TRUE(in);
  const auto doc = nlohmann::json::parse(in);
  const PuEncoding enc = PuEncoding::named(doc.at("variant").get<std::string>());
  ASSERT_EQ(doc.at("values").size(), 20u);
  for (const auto& row : doc.at("values")) {
    const double y = row.at("luminance");
    const double want = row.at("pu");
    EXPECT_LE(std::abs(enc.encode(y) - want), 1e-4 * std::abs(want)) << y;
  }
}

TEST(Pu21Test, ClampsAndRejectsNonFinite) {
  const PuEncoding enc = PuEncoding::banding_glare();
  EXPECT_EQ(enc.encode(0.0), enc.encode(0.005));
  EXPECT_EQ(enc.encode(1e6), enc.encode(10000.0));
  EXPECT_THROW(enc.encode(std::nan("")), DomainError);
}

TEST(Pu21Test, DecodeInvertsEncode) {
  const PuEncoding enc = PuEncoding::banding_glare();
  for (int i = 0; i <= 200; ++i) {
    const double y = 0.005 * std::pow(2e6, i / 200.0);
    EXPECT_NEAR(enc.decode(enc.encode(y)), y, 1e-6 * y + 1e-9) << y;
  }
}

TEST(Pu21Test, ParseErrors) {
  EXPECT_THROW(parse_pu_encoding("{"), ConfigError);
  EXPECT_THROW(parse_pu_encoding(R"({"variant":"x","coefficients":[1,2]})"), ConfigError);
  EXPECT_THROW(
      parse_pu_encoding(R"({"variant":"x","coefficients":[1,1,1,1,1,1,1],"y_min":1,"y_max":2})"),
      ValidationError);
  EXPECT_THROW(PuEncoding::named("nope"), ValidationError);
}

////////////////////////////////////////////////////////////////////////////////

class MetricsTest : public ::testing::Test {
 protected:
  PuEncoding enc = PuEncoding::banding_glare();
};

TEST_F(MetricsTest, IdenticalImages) {
  const LinearImage a = test::random_hdr(16, 16, 1);
  EXPECT_EQ(pu_psnr(a, a, enc), INFINITY);
  EXPECT_NEAR(pu_ssim(a, a, enc), 1.0, 1e-9);
  EXPECT_EQ(rmse_linear(a, a), 0.0);
}

TEST_F(MetricsTest, ConstantErrorPsnrIsResolutionInvariant) {
  const double small = pu_psnr(LinearImage::filled(4, 4, {0.5, 0.5, 0.5}),
                               LinearImage::filled(4, 4, {1, 1, 1}), enc);
  const double large = pu_psnr(LinearImage::filled(8, 8, {0.5, 0.5, 0.5}),
                               LinearImage::filled(8, 8, {1, 1, 1}), enc);
  EXPECT_TRUE(std::isfinite(small));
  EXPECT_NEAR(small, large, 1e-12);
}

TEST_F(MetricsTest, ConstantErrorRmse) {
  EXPECT_NEAR(rmse_linear(LinearImage::filled(3, 3, {0.25, 0.25, 0.25}),
                          LinearImage::filled(3, 3, {0.5, 0.5, 0.5})),
              0.25, 1e-12);
}

TEST_F(MetricsTest, MatchesNaiveOracles) {
  for (int k = 0; k < 5; ++k) {
    const LinearImage a = test::random_hdr(32, 32, 10 + k);
    const LinearImage b = test::random_hdr(32, 32, 50 + k);
    EXPECT_NEAR(pu_psnr(a, b, enc), oracle::psnr(a, b, enc.coefficients), 1e-9);
    const double L = oracle::pu(1000.0, enc.coefficients, 0.005, 10000.0);
    EXPECT_NEAR(pu_ssim(a, b, enc),
                oracle::ssim(oracle::pu_luma_grid(a, enc.coefficients),
                             oracle::pu_luma_grid(b, enc.coefficients), L),
                1e-7);
    EXPECT_NEAR(rmse_linear(a, b), oracle::rmse(a, b), 1e-12);
  }
}

TEST_F(MetricsTest, SsimDecreasesWithOffset) {
  const LinearImage gt = test::random_image(24, 24, 3);
  double prev = 1.0;
  for (double c : {0.001, 0.01, 0.1, 0.5}) {
    std::vector<float> d(gt.data().begin(), gt.data().end());
    for (float& v : d) v += static_cast<float>(c);
    const double s = pu_ssim(LinearImage(24, 24, d), gt, enc);
    EXPECT_LT(s, prev) << c;
    prev = s;
  }
}

TEST_F(MetricsTest, PsnrDecreasesWithNoise) {
  const LinearImage gt = test::random_image(32, 32, 4, 0.1, 0.9);
  double prev = INFINITY;
  for (double amp : {0.001, 0.005, 0.02, 0.05, 0.1}) {
    RandomStream rng(123);
    std::vector<float> d(gt.data().begin(), gt.data().end());
    for (float& v : d) v = static_cast<float>(std::max(0.0, v + amp * rng.normal()));
    const double p = pu_psnr(LinearImage(32, 32, d), gt, enc);
    EXPECT_LT(p, prev) << amp;
    prev = p;
  }
}

LinearImage flip(const LinearImage& img) {
  LinearImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(img.width() - 1 - x, y, img.at(x, y));
  return out;
}

TEST_F(MetricsTest, FlipInvariance) {
  const LinearImage a = test::random_hdr(20, 17, 8);
  const LinearImage b = test::random_hdr(20, 17, 9);
  EXPECT_NEAR(pu_psnr(a, b, enc), pu_psnr(flip(a), flip(b), enc), 1e-9);
  EXPECT_NEAR(pu_ssim(a, b, enc), pu_ssim(flip(a), flip(b), enc), 1e-9);
}

TEST_F(MetricsTest, RankInvariantUnderPeakScaling) {
  const LinearImage gt = test::random_image(24, 24, 5, 0.0, 1.0);
  const LinearImage close = test::random_image(24, 24, 6, 0.0, 0.02);
  std::vector<float> near_d(gt.data().begin(), gt.data().end()), far_d = near_d;
  for (std::size_t i = 0; i < near_d.size(); ++i) {
    near_d[i] += close.data()[i];
    far_d[i] += 10 * close.data()[i];
  }
  const LinearImage near_img(24, 24, near_d), far_img(24, 24, far_d);
  for (double peak : {100.0, 1000.0, 4000.0}) {
    DisplayMapping dm;
    dm.peak_luminance = peak;
    EXPECT_GT(pu_psnr(near_img, gt, enc, dm), pu_psnr(far_img, gt, enc, dm)) << peak;
    EXPECT_GT(pu_ssim(near_img, gt, enc, dm), pu_ssim(far_img, gt, enc, dm)) << peak;
  }
}

TEST_F(MetricsTest, ShapeErrors) {
  const LinearImage a(16, 16), b(16, 15), tiny(8, 8);
  EXPECT_THROW(pu_psnr(a, b, enc), ShapeError);
  EXPECT_THROW(pu_ssim(a, b, enc), ShapeError);
  EXPECT_THROW(rmse_linear(a, b), ShapeError);
  EXPECT_THROW(pu_ssim(tiny, tiny, enc), ShapeError);
}

TEST_F(MetricsTest, SsimMapShape) {
  const ScalarField a(20, 15, 1.0), b(20, 15, 1.0);
  const ScalarField m = ssim_map(a, b, 1.0);
  EXPECT_EQ(m.width(), 10);
  EXPECT_EQ(m.height(), 5);
}

}  // namespace
}  // namespace itm
