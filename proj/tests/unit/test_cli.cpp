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
#include <nlohmann/json.hpp>

#include "cli_util.h"
#include "itm/image_io.h"
#include "test_util.h"

namespace itm {
namespace {

using test::quote;
using test::read_tree;
using test::run_cli;

void make_sources(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_hdr(test::random_hdr(40, 30, 1, -6, 4), dir / "room.hdr");
  write_pfm(test::random_hdr(24, 24, 2, -4, 3), dir / "sky.pfm");
}

TEST(CliTest, VersionAndUsage) {
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("score --pred /nonexistent --gt /nonexistent --out /tmp/x"), 2);
}

TEST(CliTest, BadConfigExitsTwo) {
  test::TempDir dir("cli_cfg");
  std::ofstream(dir / "bad.ini") << "[display]\npeek = 1\n";
  make_sources(dir / "src");
  EXPECT_EQ(run_cli("synthesize --hdr-dir " + quote(dir / "src") + " --config " +
                    quote(dir / "bad.ini") + " --out " + quote(dir / "out")),
            2);
}

TEST(CliTest, ScoreIdenticalFolders) {
  test::TempDir dir("cli_score");
  make_sources(dir / "gt");
  ASSERT_EQ(run_cli("score --pred " + quote(dir / "gt") + " --gt " + quote(dir / "gt") + " --out " +
                    quote(dir / "out")),
            0);
  EXPECT_EQ(test::slurp(dir / "out/scores.csv"), "image,psnr,ssim,rmse\nroom,inf,1,0\nsky,inf,1,0\n");
  const auto doc = nlohmann::json::parse(test::slurp(dir / "out/scores.json"));
  EXPECT_EQ(doc["schema"], 1);
}

TEST(CliTest, ScoreMissingPredictionFails) {
  test::TempDir dir("cli_score_missing");
  make_sources(dir / "gt");
  std::filesystem::create_directories(dir / "pred");
  std::filesystem::copy_file(dir / "gt/room.hdr", dir / "pred/room.hdr");
  EXPECT_EQ(run_cli("score --pred " + quote(dir / "pred") + " --gt " + quote(dir / "gt") +
                    " --out " + quote(dir / "out")),
            1);
}

TEST(CliTest, SynthesizeDeterministicAcrossJobs) {
  test::TempDir dir("cli_synth");
  make_sources(dir / "src");
  const std::string base = "synthesize --hdr-dir " + quote(dir / "src") + " --count 2 --seed 9 --out ";
  ASSERT_EQ(run_cli(base + quote(dir / "a") + " --jobs 1"), 0);
  ASSERT_EQ(run_cli(base + quote(dir / "b") + " --jobs 8"), 0);
  const auto a = read_tree(dir / "a");
  EXPECT_EQ(a.size(), 2u * 2u * 2u + 1u);
  EXPECT_EQ(a, read_tree(dir / "b"));
  // nothing written next to the sources
  EXPECT_EQ(read_tree(dir / "src").size(), 2u);
}

TEST(CliTest, SdeDemoDeterministic) {
  test::TempDir dir("cli_sde");
  ASSERT_EQ(run_cli("sde-demo --size 12 --seed 4 --out " + quote(dir / "a")), 0);
  ASSERT_EQ(run_cli("sde-demo --size 12 --seed 4 --out " + quote(dir / "b")), 0);
  const auto a = read_tree(dir / "a");
  EXPECT_EQ(a.count("report.json"), 1u);
  EXPECT_EQ(a.count("error_map.pfm"), 1u);
  EXPECT_EQ(a.count("trajectory.csv"), 1u);
  EXPECT_EQ(a, read_tree(dir / "b"));
  const auto doc = nlohmann::json::parse(a.at("report.json"));
  EXPECT_EQ(doc["width"], 12);
}

TEST(CliTest, ExpandAndAnalyze) {
  test::TempDir dir("cli_expand");
  Ldr8Image ldr(20, 18);
  for (int y = 0; y < 18; ++y)
    for (int x = 0; x < 20; ++x)
      ldr.set(x, y, {static_cast<std::uint8_t>(x * 12), static_cast<std::uint8_t>(y * 14), 200});
  write_ldr8(ldr, dir / "in.png");
  ASSERT_EQ(run_cli("expand --input " + quote(dir / "in.png") + " --crf gamma:0.5 --format pfm --out " +
                    quote(dir / "exp")),
            0);
  const LinearImage expanded = read_pfm(dir / "exp/in.pfm");
  EXPECT_EQ(expanded.width(), 20);
  EXPECT_NEAR(expanded.at(19, 0)[0], std::pow(228 / 255.0, 2.0), 1e-6);

  write_hdr(test::random_hdr(20, 18, 5, -4, 1), dir / "gt.hdr");
  ASSERT_EQ(run_cli("analyze --pred " + quote(dir / "exp/in.pfm") + " --gt " + quote(dir / "gt.hdr") +
                    " --ldr " + quote(dir / "in.png") + " --losses --out " + quote(dir / "an")),
            0);
  const auto an = nlohmann::json::parse(test::slurp(dir / "an/analysis.json"));
  EXPECT_EQ(an["saturated"]["count"].get<int>() + an["non_saturated"]["count"].get<int>(), 360);
  const auto losses = nlohmann::json::parse(test::slurp(dir / "an/losses.json"));
  EXPECT_TRUE(losses.contains("total"));
  EXPECT_EQ(read_pfm(dir / "an/error_map.pfm").width(), 20);
}

TEST(CliTest, AnalyzeDatasetSample) {
  test::TempDir dir("cli_analyze_dir");
  make_sources(dir / "src");
  ASSERT_EQ(run_cli("synthesize --hdr-dir " + quote(dir / "src") + " --count 3 --seed 2 --out " +
                    quote(dir / "ds")),
            0);
  const std::string base = "analyze --pred " + quote(dir / "ds/hdr") + " --gt " + quote(dir / "ds/hdr") +
                           " --ldr " + quote(dir / "ds/ldr") + " --sample 4 --losses --out ";
  ASSERT_EQ(run_cli(base + quote(dir / "a") + " --seed 11"), 0);
  ASSERT_EQ(run_cli(base + quote(dir / "b") + " --seed 11"), 0);
  const auto a = read_tree(dir / "a");
  EXPECT_EQ(a, read_tree(dir / "b"));
  const auto doc = nlohmann::json::parse(a.at("analysis.json"));
  EXPECT_EQ(doc["sample"], 4);
  EXPECT_EQ(doc["available"], 6);
  ASSERT_EQ(doc["images"].size(), 4u);
  std::size_t pixels = 0;
  for (const auto& img : doc["images"]) {
    const std::string stem = img["image"];
    ASSERT_EQ(a.count("error_maps/" + stem + ".pfm"), 1u) << stem;
    pixels += read_pfm(dir / "a/error_maps" / (stem + ".pfm")).pixel_count();
    EXPECT_TRUE(img["metrics"]["pu_psnr"].is_string());  // identical pairs: "inf"
  }
  EXPECT_EQ(doc["saturated"]["count"].get<std::size_t>() + doc["non_saturated"]["count"].get<std::size_t>(),
            pixels);
  EXPECT_EQ(nlohmann::json::parse(a.at("losses.json"))["images"].size(), 4u);

  // a mixed file/directory invocation is a usage error
  EXPECT_EQ(run_cli("analyze --pred " + quote(dir / "ds/hdr") + " --gt " + quote(dir / "src/room.hdr") +
                    " --out " + quote(dir / "c")),
            2);
}

}  // namespace
}  // namespace itm
