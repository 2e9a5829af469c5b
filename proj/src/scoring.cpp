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

#include "itm/scoring.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "itm/error.h"
#include "itm/image_io.h"
#include "itm/parallel.h"

namespace itm {

namespace fs = std::filesystem;

namespace {

struct Listing {
  std::map<std::string, fs::path> by_stem;
  std::vector<MetricIssue> duplicates;
};

Listing list_linear_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: '" + dir.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_linear_image_path(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Listing listing;
  for (const fs::path& file : files) {
    const std::string stem = file.stem().string();
    if (!listing.by_stem.emplace(stem, file).second) {
      listing.duplicates.push_back(
          {stem, "more than one file with this name in '" + dir.string() + "'"});
    }
  }
  return listing;
}

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? number_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

MetricAggregate MetricReport::aggregate() const {
  MetricAggregate agg;
  agg.count = per_image.size();
  if (per_image.empty()) return agg;
  double ssim_sum = 0.0;
  std::size_t ssim_count = 0;
  for (const MetricRow& row : per_image) {
    agg.pu_psnr += row.pu_psnr;
    agg.rmse_linear += row.rmse_linear;
    if (row.pu_ssim) {
      ssim_sum += *row.pu_ssim;
      ++ssim_count;
    }
  }
  const double n = static_cast<double>(per_image.size());
  agg.pu_psnr /= n;
  agg.rmse_linear /= n;
  if (ssim_count > 0) agg.pu_ssim = ssim_sum / static_cast<double>(ssim_count);
  return agg;
}

MetricRow score_pair(const std::string& image, const LinearImage& pred, const LinearImage& gt,
                     const PuEncoding& enc, const DisplayMapping& dm, const SsimOptions& ssim) {
  require_same_shape(pred.shape(), gt.shape(), image.c_str());
  MetricRow row;
  row.image = image;
  row.pu_psnr = pu_psnr(pred, gt, enc, dm);
  if (pred.width() >= ssim.window && pred.height() >= ssim.window) {
    row.pu_ssim = pu_ssim(pred, gt, enc, dm, ssim);
  }
  row.rmse_linear = rmse_linear(pred, gt);
  return row;
}

MetricReport score_dataset(const fs::path& pred_dir, const fs::path& gt_dir,
                           const ScoreConfig& config) {
  config.display.validate();
  const Listing preds = list_linear_images(pred_dir);
  const Listing gts = list_linear_images(gt_dir);

  MetricReport report;
  report.errors = preds.duplicates;
  report.errors.insert(report.errors.end(), gts.duplicates.begin(), gts.duplicates.end());

  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
  for (const auto& [stem, gt_path] : gts.by_stem) {
    const auto it = preds.by_stem.find(stem);
    if (it == preds.by_stem.end()) {
      report.errors.push_back({stem, "missing prediction for ground truth '" + gt_path.filename().string() + "'"});
    } else {
      pairs.push_back({stem, {it->second, gt_path}});
    }
  }
  for (const auto& [stem, pred_path] : preds.by_stem) {
    if (!gts.by_stem.contains(stem)) {
      report.errors.push_back({stem, "no ground truth for prediction '" + pred_path.filename().string() + "'"});
    }
  }
  if (pairs.empty()) report.errors.push_back({"", "no matching prediction/ground-truth pairs"});

  std::vector<std::optional<MetricRow>> rows(pairs.size());
  std::vector<std::optional<MetricIssue>> failures(pairs.size());
  parallel_for(pairs.size(), config.jobs, [&](std::size_t i) {
    const auto& [stem, paths] = pairs[i];
    try {
      const LinearImage pred = read_linear(paths.first);
      const LinearImage gt = read_linear(paths.second);
      rows[i] = score_pair(stem, pred, gt, config.encoding, config.display, config.ssim);
    } catch (const Error& e) {
      failures[i] = MetricIssue{stem, e.what()};
    }
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (rows[i]) report.per_image.push_back(std::move(*rows[i]));
    if (failures[i]) report.errors.push_back(std::move(*failures[i]));
  }
  std::stable_sort(report.errors.begin(), report.errors.end(),
                   [](const MetricIssue& a, const MetricIssue& b) { return a.image < b.image; });
  return report;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string report_to_csv(const MetricReport& report) {
  std::string out = "image,psnr,ssim,rmse\n";
  for (const MetricRow& row : report.per_image) {
    out += row.image + "," + format_number(row.pu_psnr) + "," +
           (row.pu_ssim ? format_number(*row.pu_ssim) : std::string()) + "," +
           format_number(row.rmse_linear) + "\n";
  }
  return out;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json doc;
  doc["schema"] = kReportSchemaVersion;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const MetricRow& row : report.per_image) {
    nlohmann::ordered_json r;
    r["image"] = row.image;
    r["pu_psnr"] = number_json(row.pu_psnr);
    r["pu_ssim"] = optional_json(row.pu_ssim);
    r["rmse_linear"] = number_json(row.rmse_linear);
    rows.push_back(std::move(r));
  }
  doc["per_image"] = std::move(rows);
  const MetricAggregate agg = report.aggregate();
  nlohmann::ordered_json aggregate;
  aggregate["count"] = agg.count;
  aggregate["pu_psnr"] = agg.count ? number_json(agg.pu_psnr) : nlohmann::ordered_json(nullptr);
  aggregate["pu_ssim"] = optional_json(agg.pu_ssim);
  aggregate["rmse_linear"] = agg.count ? number_json(agg.rmse_linear) : nlohmann::ordered_json(nullptr);
  doc["aggregate"] = std::move(aggregate);
  doc["runtime_ms_per_image"] = optional_json(report.runtime_ms_per_image);
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const MetricIssue& issue : report.errors) {
    errors.push_back({{"image", issue.image}, {"message", issue.message}});
  }
  doc["errors"] = std::move(errors);
  return doc.dump(2) + "\n";
}

////////////////////////////////////////////////////////////////////////////////
// Leaderboard

std::vector<LeaderboardEntry> rank_leaderboard(std::vector<LeaderboardEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                     if (a.pu_psnr != b.pu_psnr) return a.pu_psnr > b.pu_psnr;
                     if (a.pu_ssim != b.pu_ssim) return a.pu_ssim > b.pu_ssim;
                     return a.team < b.team;
                   });
  return entries;
}

std::string format_leaderboard(const std::vector<LeaderboardEntry>& ranked) {
  std::size_t name_width = 4;
  for (const auto& e : ranked) name_width = std::max(name_width, e.team.size());
  std::string out;
  char line[512];
  std::snprintf(line, sizeof(line), "%-4s  %-*s  %14s  %9s\n", "Rank", static_cast<int>(name_width),
                "Team", "PU21-PSNR (dB)", "PU21-SSIM");
  out += line;
  int rank = 0;
  for (const auto& e : ranked) {
    std::snprintf(line, sizeof(line), "%-4d  %-*s  %14.2f  %9.2f\n", ++rank,
                  static_cast<int>(name_width), e.team.c_str(), e.pu_psnr, e.pu_ssim);
    out += line;
  }
  return out;
}

std::vector<LeaderboardEntry> parse_leaderboard_csv(const std::string& text) {
  std::vector<LeaderboardEntry> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("team", 0) == 0) continue;
    const auto last = line.rfind(',');
    const auto middle = last == std::string::npos ? last : line.rfind(',', last - 1);
    if (middle == std::string::npos || middle == 0) {
      throw ConfigError("leaderboard line " + std::to_string(line_no) + ": expected team,psnr,ssim");
    }
    LeaderboardEntry e;
    e.team = line.substr(0, middle);
    try {
      e.pu_psnr = std::stod(line.substr(middle + 1, last - middle - 1));
      e.pu_ssim = std::stod(line.substr(last + 1));
    } catch (const std::exception&) {
      throw ConfigError("leaderboard line " + std::to_string(line_no) + ": invalid number");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace itm
