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

#ifndef ITM_SCORING_H
#define ITM_SCORING_H

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "itm/color_transfer.h"
#include "itm/metrics.h"
#include "itm/pu21.h"

namespace itm {

inline constexpr int kReportSchemaVersion = 1;

struct MetricRow {
  std::string image;
  double pu_psnr = 0.0;                // dB, +inf for identical images
  std::optional<double> pu_ssim;       // absent when the image is smaller than the window
  double rmse_linear = 0.0;
};

struct MetricIssue {
  std::string image;
  std::string message;
};

struct MetricAggregate {
  std::size_t count = 0;
  double pu_psnr = 0.0;
  std::optional<double> pu_ssim;
  double rmse_linear = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> per_image;  // sorted by image id
  std::vector<MetricIssue> errors;   // sorted by image id
  std::optional<double> runtime_ms_per_image;

  // Arithmetic means over per_image; SSIM over rows that have one.
  MetricAggregate aggregate() const;
  bool ok() const { return errors.empty(); }
};

MetricRow score_pair(const std::string& image, const LinearImage& pred, const LinearImage& gt,
                     const PuEncoding& enc, const DisplayMapping& dm,
                     const SsimOptions& ssim = {});

struct ScoreConfig {
  PuEncoding encoding = PuEncoding::banding_glare();
  DisplayMapping display;
  SsimOptions ssim;
  int jobs = 1;
};

// Pairs files by stem (name without extension) across the two directories.
// Ground truth without a prediction, predictions without ground truth and
// unreadable or mismatched pairs are reported as errors, never skipped.
MetricReport score_dataset(const std::filesystem::path& pred_dir,
                           const std::filesystem::path& gt_dir, const ScoreConfig& config);

// CSV columns (frozen): image,psnr,ssim,rmse. Infinite PSNR is "inf",
// missing SSIM is empty.
std::string report_to_csv(const MetricReport& report);
// JSON document with "schema": 1.
std::string report_to_json(const MetricReport& report);

// Shortest round-trip decimal form; "inf" / "-inf" / "nan" for non-finite.
std::string format_number(double v);

////////////////////////////////////////////////////////////////////////////////
// Leaderboard

struct LeaderboardEntry {
  std::string team;
  double pu_psnr = 0.0;
  double pu_ssim = 0.0;
};

// Descending PSNR, then descending SSIM, then team name.
std::vector<LeaderboardEntry> rank_leaderboard(std::vector<LeaderboardEntry> entries);
std::string format_leaderboard(const std::vector<LeaderboardEntry>& ranked);
// Lines of "team,psnr,ssim"; an optional header line starting with "team" is skipped.
std::vector<LeaderboardEntry> parse_leaderboard_csv(const std::string& text);

}  // namespace itm

#endif  // ITM_SCORING_H
