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

#include <fstream>

#include "itm/config.h"
#include "itm/error.h"
#include "test_util.h"

namespace itm {
namespace {

TEST(ConfigTest, Defaults) {
  const Config c = parse_config("");
  EXPECT_EQ(c.display.peak_luminance, 1000.0);
  EXPECT_EQ(c.synth_count, 1);
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_EQ(c.sde.build().steps(), 100u);
}

TEST(ConfigTest, FullExample) {
  const Config c = parse_config(R"(
; comment
[display]
peak = 4000
floor = 0.01
reference_white = 2

[synth]
sat_frac = 0.02
dark_frac = 0.2
sigma_range = 0.001, 0.02
crf = gamma
gamma_range = 0.4,0.5
crop = 256
crop_mode = center
format = ppm
hdr_format = pfm
count = 3

[score]
pu = banding_glare

[sde]
schedule = constant
steps = 50
theta = 2
sigma = 0.3
dt = 0.01

[analysis]
quantile = 0.9
joint_bins = 16

[seeds]
master = 12345678901234
)");
  EXPECT_EQ(c.display.peak_luminance, 4000);
  EXPECT_EQ(c.display.reference_white, 2);
  EXPECT_EQ(c.synth.sigma_hi, 0.02);
  EXPECT_EQ(c.synth.crf_family, "gamma");
  EXPECT_EQ(c.synth.crop_mode, CropMode::kCenter);
  EXPECT_EQ(c.synth.hdr_format, "pfm");
  EXPECT_EQ(c.synth_count, 3);
  EXPECT_EQ(c.sde.build().steps(), 50u);
  EXPECT_EQ(c.sde.build().theta[7], 2.0);
  EXPECT_EQ(c.analysis.joint_bins, 16);
  EXPECT_EQ(c.seed, 12345678901234u);
}

TEST(ConfigTest, RejectsUnknownOrBad) {
  EXPECT_THROW(parse_config("[display]\npeek = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("[dispaly]\npeak = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("peak = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("[display]\npeak = lots\n"), ConfigError);
  EXPECT_THROW(parse_config("[display]\nfloor = 2000\n"), ConfigError);
  EXPECT_THROW(parse_config("[synth]\ncount = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[synth]\nsigma_range = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_config("[score]\npu = nope\n"), ConfigError);
  EXPECT_THROW(parse_config("[sde]\nschedule = constant\ntheta = 500\n"), ConfigError);
  EXPECT_THROW(parse_config("[seeds]\nmaster = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("[display\n"), ConfigError);
}

TEST(ConfigTest, RelativePathsResolveAgainstConfigDir) {
  test::TempDir dir("config");
  std::filesystem::create_directories(dir / "sub");
  std::ofstream(dir / "sub/crf.txt") << "0 0.2 0.5 0.8 1\n";
  std::ofstream(dir / "sub/run.ini") << "[synth]\ncrf = table:crf.txt\n";
  const Config c = load_config(dir / "sub/run.ini");
  ASSERT_TRUE(c.synth.crf_table.has_value());
  EXPECT_EQ(c.synth.crf_table->parameters().size(), 5u);
  EXPECT_THROW(load_config(dir / "missing.ini"), ConfigError);
}

}  // namespace
}  // namespace itm
