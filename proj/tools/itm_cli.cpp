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

// itmbench: dataset synthesis, scoring, analysis, baseline expansion and the
// SDE demo behind one executable.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <map>
#include <optional>
#include <string>

#include "itm/analysis.h"
#include "itm/camera_sim.h"
#include "itm/config.h"
#include "itm/error.h"
#include "itm/image_io.h"
#include "itm/itm_operators.h"
#include "itm/losses.h"
#include "itm/rng.h"
#include "itm/scoring.h"
#include "itm/sde.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitItemFailure = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out;
  int jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed (overrides [seeds] master)");
  cmd->add_option("--config", c.config_path, "INI configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1, 1024));
}

itm::Config load(const Common& c) {
  return c.config_path.empty() ? itm::Config{} : itm::load_config(c.config_path);
}

std::uint64_t seed_of(const Common& c, const itm::Config& cfg) {
  return c.seed.value_or(cfg.seed.value_or(0));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw itm::Error("cannot write " + path.string());
  out << text;
  if (!out) throw itm::Error("failed writing " + path.string());
}

// Gray RGB image holding a scalar field.
itm::LinearImage field_image(const itm::ScalarField& f) {
  std::vector<float> data(f.size() * 3);
  for (std::size_t i = 0; i < f.size(); ++i) {
    data[3 * i] = data[3 * i + 1] = data[3 * i + 2] = static_cast<float>(f[i]);
  }
  return itm::LinearImage(f.width(), f.height(), std::move(data));
}

ordered_json region_json(const itm::RegionStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"p50", s.p50}, {"p95", s.p95}};
}

// Smooth radiance ramp with a few bright blobs, for running the SDE demo
// without input files.
itm::LinearImage procedural_scene(int w, int h, std::uint64_t seed) {
  itm::RandomStream rng(itm::derive_seed(seed, "scene"));
  struct Blob {
    double x, y, r, gain;
    itm::Rgb tint;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 3; ++i) {
    blobs.push_back({rng.uniform(0, w), rng.uniform(0, h), rng.uniform(0.1, 0.3) * w,
                     rng.uniform(2.0, 8.0), {rng.uniform(0.6, 1.0), rng.uniform(0.6, 1.0),
                                              rng.uniform(0.6, 1.0)}});
  }
  itm::LinearImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double base = 0.02 + 0.5 * (x + 0.5) / w;
      itm::Rgb p{base, base * 0.9, base * 0.8};
      for (const Blob& b : blobs) {
        const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.r * b.r);
        const double v = b.gain * std::exp(-d2);
        for (int c = 0; c < 3; ++c) p[c] += v * b.tint[c];
      }
      img.set(x, y, p);
    }
  }
  return img;
}

itm::LinearImage load_linearized(const fs::path& path, const itm::Crf& crf) {
  if (itm::is_linear_image_path(path)) return itm::read_linear(path);
  return itm::naive_expand(itm::read_ldr8(path), crf);
}

////////////////////////////////////////////////////////////////////////////////

struct SynthArgs {
  Common common;
  std::string hdr_dir;
  std::optional<int> count;
};

int run_synthesize(const SynthArgs& a) {
  itm::Config cfg = load(a.common);
  cfg.synth.jobs = a.common.jobs;
  const int count = a.count.value_or(cfg.synth_count);
  const auto result = itm::generate_dataset(a.hdr_dir, count, cfg.synth,
                                            seed_of(a.common, cfg), a.common.out);
  for (const auto& f : result.failures) {
    std::cerr << "synthesize: " << f.source << ": " << f.message << "\n";
  }
  std::cerr << "synthesize: " << result.records.size() << " pairs, " << result.failures.size()
            << " failures\n";
  return result.failures.empty() ? kExitOk : kExitItemFailure;
}

struct ScoreArgs {
  Common common;
  std::string pred;
  std::string gt;
  std::string leaderboard;
  std::optional<double> runtime_ms;
};

int run_score(const ScoreArgs& a) {
  const itm::Config cfg = load(a.common);
  const fs::path out(a.common.out);
  fs::create_directories(out);
  int status = kExitOk;
  if (!a.pred.empty() || !a.gt.empty()) {
    if (a.pred.empty() || a.gt.empty()) {
      throw CLI::ValidationError("score", "--pred and --gt must be given together");
    }
    itm::ScoreConfig sc;
    sc.encoding = cfg.encoding;
    sc.display = cfg.display;
    sc.jobs = a.common.jobs;
    itm::MetricReport report = itm::score_dataset(a.pred, a.gt, sc);
    report.runtime_ms_per_image = a.runtime_ms;
    write_text(out / "scores.csv", itm::report_to_csv(report));
    write_text(out / "scores.json", itm::report_to_json(report));
    const auto agg = report.aggregate();
    std::cout << "images " << agg.count << "  PU21-PSNR " << itm::format_number(agg.pu_psnr)
              << "  PU21-SSIM " << (agg.pu_ssim ? itm::format_number(*agg.pu_ssim) : "n/a")
              << "  RMSE " << itm::format_number(agg.rmse_linear) << "\n";
    for (const auto& e : report.errors) std::cerr << "score: " << e.image << ": " << e.message << "\n";
    if (!report.ok()) status = kExitItemFailure;
  }
  if (!a.leaderboard.empty()) {
    const auto bytes = itm::read_file_bytes(a.leaderboard);
    const auto ranked =
        itm::rank_leaderboard(itm::parse_leaderboard_csv(std::string(bytes.begin(), bytes.end())));
    const std::string table = itm::format_leaderboard(ranked);
    write_text(out / "leaderboard.txt", table);
    std::cout << table;
  }
  if (a.pred.empty() && a.leaderboard.empty()) {
    throw CLI::ValidationError("score", "nothing to do: give --pred/--gt or --leaderboard");
  }
  return status;
}

struct AnalyzeArgs {
  Common common;
  std::string pred;
  std::string gt;
  std::string ldr;
  std::size_t sample = 0;  // directory mode: 0 keeps every pair
  bool losses = false;
};

ordered_json metrics_json(const std::string& id, const itm::LinearImage& pred,
                          const itm::LinearImage& gt, const itm::Config& cfg) {
  itm::MetricReport r;
  r.per_image.push_back(itm::score_pair(id, pred, gt, cfg.encoding, cfg.display));
  return ordered_json::parse(itm::report_to_json(r))["per_image"][0];
}

ordered_json losses_json(const itm::LinearImage& pred, const itm::LinearImage& gt) {
  itm::TotalLossInputs in;
  in.pred = &pred;
  in.gt = &gt;
  const auto total = itm::total_loss(in);
  ordered_json terms = ordered_json::array();
  for (const auto& t : total.terms) {
    terms.push_back(
        {{"term", t.name}, {"weight", t.weight}, {"value", t.value}, {"contribution", t.contribution}});
  }
  return {{"terms", terms}, {"total", total.total}};
}

void add_split_stats(ordered_json& doc, const itm::ScalarField& err, const itm::Ldr8Image& ldr,
                     const itm::SaturationSplit& split, const itm::Config& cfg) {
  const auto stats = itm::error_stats(err, split);
  doc["saturated"] = region_json(stats.saturated);
  doc["non_saturated"] = region_json(stats.non_saturated);
  doc["histogram"] = {{"edges", stats.histogram.edges}, {"counts", stats.histogram.counts}};
  const auto joint = itm::intensity_error_joint(ldr, err, cfg.analysis.joint_bins);
  doc["joint"] = {{"intensity_edges", joint.intensity_edges},
                  {"error_edges", joint.error_edges},
                  {"counts", joint.counts}};
}

int analyze_pair(const AnalyzeArgs& a, const itm::Config& cfg, const fs::path& out) {
  const itm::LinearImage pred = itm::read_linear(a.pred);
  const itm::LinearImage gt = itm::read_linear(a.gt);
  const itm::ScalarField err = itm::error_map(pred, gt, cfg.encoding, cfg.display);
  itm::write_pfm(field_image(err), out / "error_map.pfm");

  ordered_json doc;
  doc["schema"] = itm::kReportSchemaVersion;
  doc["metrics"] = metrics_json(fs::path(a.pred).stem().string(), pred, gt, cfg);
  if (!a.ldr.empty()) {
    const itm::Ldr8Image ldr = itm::read_ldr8(a.ldr);
    const auto split = itm::saturation_split(ldr, cfg.analysis.quantile);
    doc["saturation"] = {{"quantile", cfg.analysis.quantile},
                         {"threshold", split.threshold},
                         {"fraction", split.frac}};
    add_split_stats(doc, err, ldr, split, cfg);
  }
  write_text(out / "analysis.json", doc.dump(2) + "\n");
  if (a.losses) {
    ordered_json losses{{"schema", itm::kReportSchemaVersion}};
    losses.update(losses_json(pred, gt));
    write_text(out / "losses.json", losses.dump(2) + "\n");
  }
  return kExitOk;
}

// Regular files of dir keyed by stem; a stem seen twice is an error.
std::map<std::string, fs::path> files_by_stem(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string stem = e.path().stem().string();
    if (!out.emplace(stem, e.path()).second) {
      throw itm::Error("two files with stem '" + stem + "' in " + dir.string());
    }
  }
  return out;
}

// Directory mode: a seeded sample of pairs, per-image records and statistics
// pooled over every sampled pixel.
int analyze_dataset(const AnalyzeArgs& a, const itm::Config& cfg, const fs::path& out,
                    std::uint64_t seed) {
  if (!fs::is_directory(a.gt) || (!a.ldr.empty() && !fs::is_directory(a.ldr))) {
    throw CLI::ValidationError("analyze", "--pred, --gt and --ldr must all be files or all be directories");
  }
  const auto preds = files_by_stem(a.pred);
  const auto gts = files_by_stem(a.gt);
  const auto ldrs = a.ldr.empty() ? std::map<std::string, fs::path>{} : files_by_stem(a.ldr);

  int status = kExitOk;
  std::vector<std::string> stems;
  for (const auto& [stem, path] : gts) {
    if (!preds.count(stem)) {
      std::cerr << "analyze: " << stem << ": missing prediction\n";
      status = kExitItemFailure;
    } else if (!a.ldr.empty() && !ldrs.count(stem)) {
      std::cerr << "analyze: " << stem << ": missing LDR input\n";
      status = kExitItemFailure;
    } else {
      stems.push_back(stem);
    }
  }
  for (const auto& [stem, path] : preds) {
    if (!gts.count(stem)) {
      std::cerr << "analyze: " << stem << ": no ground truth\n";
      status = kExitItemFailure;
    }
  }
  if (stems.empty()) throw itm::Error("analyze: no complete pairs");

  // Order by a keyed hash of the stem so the sample does not depend on
  // directory listing order, then restore name order.
  const std::uint64_t key = itm::derive_seed(seed, "analyze-sample");
  std::sort(stems.begin(), stems.end(), [&](const std::string& x, const std::string& y) {
    const auto hx = itm::derive_seed(key, x), hy = itm::derive_seed(key, y);
    return hx != hy ? hx < hy : x < y;
  });
  if (a.sample > 0 && a.sample < stems.size()) stems.resize(a.sample);
  std::sort(stems.begin(), stems.end());

  fs::create_directories(out / "error_maps");
  std::vector<double> pooled_err;
  std::vector<std::uint8_t> pooled_ldr, pooled_mask;
  ordered_json images = ordered_json::array();
  ordered_json losses = ordered_json::array();
  for (const std::string& stem : stems) {
    const itm::LinearImage pred = itm::read_linear(preds.at(stem));
    const itm::LinearImage gt = itm::read_linear(gts.at(stem));
    const itm::ScalarField err = itm::error_map(pred, gt, cfg.encoding, cfg.display);
    itm::write_pfm(field_image(err), out / "error_maps" / (stem + ".pfm"));
    ordered_json row{{"image", stem}, {"metrics", metrics_json(stem, pred, gt, cfg)}};
    pooled_err.insert(pooled_err.end(), err.values().begin(), err.values().end());
    if (!a.ldr.empty()) {
      const itm::Ldr8Image ldr = itm::read_ldr8(ldrs.at(stem));
      const auto split = itm::saturation_split(ldr, cfg.analysis.quantile);
      if (split.saturated_mask.size() != err.size()) {
        throw itm::ShapeError("analyze: " + stem + ": LDR and HDR sizes differ");
      }
      row["saturation"] = {{"threshold", split.threshold}, {"fraction", split.frac}};
      pooled_ldr.insert(pooled_ldr.end(), ldr.data().begin(), ldr.data().end());
      pooled_mask.insert(pooled_mask.end(), split.saturated_mask.begin(), split.saturated_mask.end());
    }
    images.push_back(std::move(row));
    if (a.losses) {
      ordered_json l{{"image", stem}};
      l.update(losses_json(pred, gt));
      losses.push_back(std::move(l));
    }
  }

  ordered_json doc;
  doc["schema"] = itm::kReportSchemaVersion;
  doc["seed"] = seed;
  doc["sample"] = stems.size();
  doc["available"] = gts.size();
  doc["images"] = images;
  if (!a.ldr.empty()) {
    // Pixels of all sampled images laid out as one row; each image keeps its
    // own threshold.
    const int n = static_cast<int>(pooled_err.size());
    const itm::ScalarField err(n, 1, std::move(pooled_err));
    const itm::Ldr8Image ldr(n, 1, std::move(pooled_ldr));
    itm::SaturationSplit split;
    split.saturated_mask = std::move(pooled_mask);
    split.frac = static_cast<double>(split.saturated_count()) / n;
    split.threshold = std::nan("");
    doc["saturation"] = {{"quantile", cfg.analysis.quantile}, {"fraction", split.frac}};
    add_split_stats(doc, err, ldr, split, cfg);
  }
  write_text(out / "analysis.json", doc.dump(2) + "\n");
  if (a.losses) {
    write_text(out / "losses.json",
               ordered_json{{"schema", itm::kReportSchemaVersion}, {"images", losses}}.dump(2) + "\n");
  }
  return status;
}

int run_analyze(const AnalyzeArgs& a) {
  const itm::Config cfg = load(a.common);
  const fs::path out(a.common.out);
  if (fs::is_directory(a.pred)) return analyze_dataset(a, cfg, out, seed_of(a.common, cfg));
  if (fs::is_directory(a.gt) || (!a.ldr.empty() && fs::is_directory(a.ldr))) {
    throw CLI::ValidationError("analyze", "--pred, --gt and --ldr must all be files or all be directories");
  }
  fs::create_directories(out);
  return analyze_pair(a, cfg, out);
}

struct ExpandArgs {
  Common common;
  std::string input;
  std::string crf = "srgb";
  std::string format = "hdr";
};

int run_expand(const ExpandArgs& a) {
  load(a.common);
  const fs::path out(a.common.out);
  fs::create_directories(out);
  const itm::Crf crf = itm::parse_crf(a.crf);
  const itm::LinearImage hdr = itm::naive_expand(itm::read_ldr8(a.input), crf);
  const fs::path target = out / (fs::path(a.input).stem().string() + "." + a.format);
  itm::write_linear(hdr, target);
  std::cout << target.string() << "\n";
  return kExitOk;
}

struct SdeArgs {
  Common common;
  std::string ldr;
  std::string gt;
  std::string crf = "srgb";
  int size = 32;
};

int run_sde_demo(const SdeArgs& a) {
  const itm::Config cfg = load(a.common);
  const fs::path out(a.common.out);
  const std::uint64_t seed = seed_of(a.common, cfg);
  const itm::SdeSchedule sched = cfg.sde.build();

  std::optional<itm::LinearImage> gt, ldr;
  if (!a.gt.empty()) {
    gt = itm::read_linear(a.gt);
    if (a.ldr.empty()) throw CLI::ValidationError("sde-demo", "--gt needs --ldr");
    ldr = load_linearized(a.ldr, itm::parse_crf(a.crf));
  } else {
    if (!a.ldr.empty()) throw CLI::ValidationError("sde-demo", "--ldr needs --gt");
    gt = procedural_scene(a.size, a.size, seed);
    const itm::Crf crf = itm::parse_crf(a.crf);
    const itm::Ldr8Image sim =
        itm::simulate_ldr(*gt, 0.0, crf, {0.005, 0.0, 0.0}, itm::derive_seed(seed, "camera"));
    ldr = itm::naive_expand(sim, crf);
  }
  fs::create_directories(out);

  itm::SdeDemoConfig dc;
  dc.encoding = cfg.encoding;
  dc.display = cfg.display;
  dc.seed = seed;
  const auto result = itm::itm_sde_demo(*ldr, *gt, sched, dc);

  ordered_json doc;
  doc["schema"] = itm::kReportSchemaVersion;
  doc["seed"] = seed;
  doc["schedule"] = {{"kind", cfg.sde.schedule}, {"steps", sched.steps()}, {"dt", sched.dt}};
  doc["width"] = gt->width();
  doc["height"] = gt->height();
  doc["degraded_mae_to_mu"] = result.degraded_mae_to_mu;
  doc["restored_max_abs"] = result.restored_max_abs;
  doc["metrics"] = ordered_json::parse(itm::report_to_json(result.report));
  write_text(out / "report.json", doc.dump(2) + "\n");
  itm::write_pfm(field_image(result.error_map), out / "error_map.pfm");
  write_text(out / "trajectory.csv", itm::sde_trace_to_csv(result.trace));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"itmbench: inverse tone mapping benchmark toolkit"};
  app.set_version_flag("--version", std::string("itmbench ") + ITM_VERSION + " (report schema " +
                                        std::to_string(itm::kReportSchemaVersion) + ")");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synthesize", "Render LDR/HDR training pairs from HDR sources");
  add_common(c_synth, synth.common);
  c_synth->add_option("--hdr-dir", synth.hdr_dir, "Directory of .hdr/.pfm sources")
      ->required()
      ->check(CLI::ExistingDirectory);
  c_synth->add_option("--count", synth.count, "Pairs per source image")->check(CLI::PositiveNumber);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "PU21 metrics for prediction/ground-truth folders");
  add_common(c_score, score.common);
  c_score->add_option("--pred", score.pred, "Prediction directory")->check(CLI::ExistingDirectory);
  c_score->add_option("--gt", score.gt, "Ground-truth directory")->check(CLI::ExistingDirectory);
  c_score->add_option("--leaderboard", score.leaderboard, "CSV of team,psnr,ssim to rank")
      ->check(CLI::ExistingFile);
  c_score->add_option("--runtime-ms", score.runtime_ms, "Reported runtime per image (ms)");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "PU error map and saturated-region statistics");
  add_common(c_analyze, analyze.common);
  c_analyze->add_option("--pred", analyze.pred, "Predicted HDR (file or directory)")
      ->required()
      ->check(CLI::ExistingPath);
  c_analyze->add_option("--gt", analyze.gt, "Ground-truth HDR (file or directory)")
      ->required()
      ->check(CLI::ExistingPath);
  c_analyze->add_option("--ldr", analyze.ldr, "8-bit input for the saturation split (file or directory)")
      ->check(CLI::ExistingPath);
  c_analyze->add_option("--sample", analyze.sample, "Directory mode: analyze a seeded sample of N pairs");
  c_analyze->add_flag("--losses", analyze.losses, "Also write the loss breakdown");

  ExpandArgs expand;
  auto* c_expand = app.add_subcommand("expand", "Baseline inverse-CRF expansion of an 8-bit image");
  add_common(c_expand, expand.common);
  c_expand->add_option("--input", expand.input, "8-bit image")->required()->check(CLI::ExistingFile);
  c_expand->add_option("--crf", expand.crf, "identity, srgb, gamma:g, sigmoid:n,s, table:path");
  c_expand->add_option("--format", expand.format, "hdr or pfm")
      ->check(CLI::IsMember({"hdr", "pfm"}));

  SdeArgs sde;
  auto* c_sde = app.add_subcommand("sde-demo", "Forward/backward restoration SDE diagnostic");
  add_common(c_sde, sde.common);
  c_sde->add_option("--ldr", sde.ldr, "LDR input (8-bit or linear)")->check(CLI::ExistingFile);
  c_sde->add_option("--gt", sde.gt, "Linear HDR ground truth")->check(CLI::ExistingFile);
  c_sde->add_option("--crf", sde.crf, "CRF used to linearize 8-bit input");
  c_sde->add_option("--size", sde.size, "Side of the procedural scene when no input is given")
      ->check(CLI::Range(2, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kExitUsage;
  }

  try {
    if (c_synth->parsed()) return run_synthesize(synth);
    if (c_score->parsed()) return run_score(score);
    if (c_analyze->parsed()) return run_analyze(analyze);
    if (c_expand->parsed()) return run_expand(expand);
    if (c_sde->parsed()) return run_sde_demo(sde);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const itm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitItemFailure;
  }
  return kExitUsage;
}
