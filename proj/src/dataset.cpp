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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>

#include <nlohmann/json.hpp>

#include "itm/camera_sim.h"
#include "itm/error.h"
#include "itm/image_io.h"
#include "itm/parallel.h"
#include "itm/rng.h"

namespace itm {

namespace fs = std::filesystem;

namespace {

Crf sample_crf(const SynthesisConfig& config, RandomStream& rng) {
  if (config.crf_family == "gamma") return Crf::gamma(rng.uniform(config.gamma_lo, config.gamma_hi));
  if (config.crf_family == "sigmoid") {
    const double n = rng.uniform(config.sigmoid_n_lo, config.sigmoid_n_hi);
    const double s = rng.uniform(config.sigmoid_s_lo, config.sigmoid_s_hi);
    return Crf::sigmoid(n, s);
  }
  if (config.crf_family == "table") {
    if (!config.crf_table) throw ConfigError("crf family 'table' needs a table");
    return *config.crf_table;
  }
  throw ConfigError("unknown CRF family '" + config.crf_family + "'");
}

CropWindow choose_crop(const LinearImage& image, const SynthesisConfig& config, RandomStream& rng) {
  if (config.crop <= 0) return {0, 0, image.width(), image.height()};
  if (image.width() < config.crop || image.height() < config.crop) {
    throw RangeError("source " + std::to_string(image.width()) + "x" +
                     std::to_string(image.height()) + " is smaller than the " +
                     std::to_string(config.crop) + " crop");
  }
  const int slack_x = image.width() - config.crop;
  const int slack_y = image.height() - config.crop;
  if (config.crop_mode == CropMode::kCenter) {
    return {slack_x / 2, slack_y / 2, config.crop, config.crop};
  }
  const int x = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(slack_x + 1));
  const int y = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(slack_y + 1));
  return {x, y, config.crop, config.crop};
}

LinearImage scale_image(const LinearImage& image, double ev) {
  const RgbField exposed = expose(image, ev, 0.0, 0);
  const auto v = exposed.values();
  return LinearImage(image.width(), image.height(), std::vector<float>(v.begin(), v.end()));
}

std::string pair_name(const fs::path& source, int index) {
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "_%04d", index);
  return source.stem().string() + suffix;
}

void validate(const SynthesisConfig& config) {
  if (!(config.sigma_lo >= 0.0 && config.sigma_lo <= config.sigma_hi)) {
    throw ConfigError("sigma range must satisfy 0 <= lo <= hi");
  }
  if (config.ldr_format != "png" && config.ldr_format != "ppm" && config.ldr_format != "jpg") {
    throw ConfigError("ldr format must be png, ppm or jpg");
  }
  if (config.hdr_format != "hdr" && config.hdr_format != "pfm") {
    throw ConfigError("hdr format must be hdr or pfm");
  }
  if (config.crop < 0) throw ConfigError("crop must be >= 0");
}

}  // namespace

std::uint64_t pair_seed(std::uint64_t master_seed, std::string_view source, int index) {
  return derive_seed(derive_seed(master_seed, source), static_cast<std::uint64_t>(index));
}

LinearImage crop(const LinearImage& image, const CropWindow& window) {
  if (window.x < 0 || window.y < 0 || window.width <= 0 || window.height <= 0 ||
      window.x + window.width > image.width() || window.y + window.height > image.height()) {
    throw ShapeError("crop window outside the image");
  }
  LinearImage out(window.width, window.height);
  for (int y = 0; y < window.height; ++y) {
    for (int x = 0; x < window.width; ++x) out.set(x, y, image.at(window.x + x, window.y + y));
  }
  return out;
}

Crf crf_from_record(const SynthesisRecord& record) {
  const auto& p = record.crf_parameters;
  if (record.crf_family == "gamma" && p.size() == 1) return Crf::gamma(p[0]);
  if (record.crf_family == "sigmoid" && p.size() == 2) return Crf::sigmoid(p[0], p[1]);
  if (record.crf_family == "table") return Crf::table(p);
  throw FormatError("record holds an invalid CRF '" + record.crf_family + "'");
}

Ldr8Image replay(const SynthesisRecord& record, const LinearImage& cropped_source) {
  NoiseParams noise;
  noise.sigma_read = record.sigma;
  return simulate_ldr(cropped_source, record.ev, crf_from_record(record), noise, record.seed);
}

std::string record_to_json_line(const SynthesisRecord& r) {
  nlohmann::ordered_json j;
  j["source"] = r.source;
  j["index"] = r.index;
  j["crop"] = {{"x", r.crop.x}, {"y", r.crop.y}, {"width", r.crop.width}, {"height", r.crop.height}};
  j["ev"] = r.ev;
  j["crf"] = {{"family", r.crf_family}, {"parameters", r.crf_parameters}};
  j["sigma"] = r.sigma;
  j["seed"] = r.seed;
  j["ldr"] = r.ldr_file;
  j["hdr"] = r.hdr_file;
  return j.dump();
}

SynthesisRecord record_from_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    SynthesisRecord r;
    r.source = j.at("source").get<std::string>();
    r.index = j.at("index").get<int>();
    const auto& c = j.at("crop");
    r.crop = {c.at("x").get<int>(), c.at("y").get<int>(), c.at("width").get<int>(),
              c.at("height").get<int>()};
    r.ev = j.at("ev").get<double>();
    r.crf_family = j.at("crf").at("family").get<std::string>();
    r.crf_parameters = j.at("crf").at("parameters").get<std::vector<double>>();
    r.sigma = j.at("sigma").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ldr_file = j.at("ldr").get<std::string>();
    r.hdr_file = j.at("hdr").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest record: ") + e.what());
  }
}

SynthesisResult generate_dataset(const fs::path& hdr_dir, int count_per_image,
                                 const SynthesisConfig& config, std::uint64_t master_seed,
                                 const fs::path& out_dir) {
  validate(config);
  if (count_per_image < 1) throw ConfigError("count per image must be >= 1");
  if (!fs::is_directory(hdr_dir)) throw FormatError("not a directory: '" + hdr_dir.string() + "'");

  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(hdr_dir)) {
    if (entry.is_regular_file() && is_linear_image_path(entry.path())) sources.push_back(entry.path());
  }
  std::sort(sources.begin(), sources.end());

  fs::create_directories(out_dir / "ldr");
  fs::create_directories(out_dir / "hdr");

  std::vector<std::vector<SynthesisRecord>> per_source(sources.size());
  std::vector<std::optional<SynthesisFailure>> failures(sources.size());

  parallel_for(sources.size(), config.jobs, [&](std::size_t s) {
    const fs::path& path = sources[s];
    const std::string source_id = path.filename().string();
    try {
      const LinearImage image = read_linear(path);
      for (int index = 0; index < count_per_image; ++index) {
        const std::uint64_t seed = pair_seed(master_seed, source_id, index);
        RandomStream crop_rng(derive_seed(seed, "crop"));
        RandomStream param_rng(derive_seed(seed, "params"));

        SynthesisRecord record;
        record.source = source_id;
        record.index = index;
        record.crop = choose_crop(image, config, crop_rng);
        const LinearImage cropped = crop(image, record.crop);

        const ExposureRange range =
            estimate_exposure_range(cropped, config.sat_frac, config.dark_frac);
        record.ev = param_rng.uniform(range.ev_min, range.ev_max);
        const Crf crf = sample_crf(config, param_rng);
        record.crf_family = crf.family() == Crf::Family::kGamma     ? "gamma"
                            : crf.family() == Crf::Family::kSigmoid ? "sigmoid"
                                                                    : "table";
        record.crf_parameters = crf.parameters();
        record.sigma = param_rng.uniform(config.sigma_lo, config.sigma_hi);
        record.seed = derive_seed(seed, "noise");

        const std::string name = pair_name(path, index);
        record.ldr_file = "ldr/" + name + "." + config.ldr_format;
        record.hdr_file = "hdr/" + name + "." + config.hdr_format;

        write_ldr8(replay(record, cropped), out_dir / record.ldr_file, config.jpeg_quality);
        write_linear(scale_image(cropped, record.ev), out_dir / record.hdr_file);
        per_source[s].push_back(std::move(record));
      }
    } catch (const Error& e) {
      failures[s] = SynthesisFailure{source_id, e.what()};
    }
  });

  SynthesisResult result;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (auto& record : per_source[s]) result.records.push_back(std::move(record));
    if (failures[s]) result.failures.push_back(std::move(*failures[s]));
  }

  std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) throw FormatError("cannot write manifest in '" + out_dir.string() + "'");
  for (const SynthesisRecord& record : result.records) manifest << record_to_json_line(record) << "\n";
  return result;
}

}  // namespace itm
