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

#ifndef ITM_CAMERA_SIM_H
#define ITM_CAMERA_SIM_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itm/image.h"

namespace itm {

////////////////////////////////////////////////////////////////////////////////
// Camera response functions

// Strictly increasing map of [0, 1] onto [0, 1] with f(0) = 0 and f(1) = 1.
class Crf {
 public:
  enum class Family { kGamma, kSigmoid, kTable };

  static Crf identity() { return gamma(1.0); }
  // f(x) = x^g, g > 0.
  static Crf gamma(double g);
  // f(x) = (1 + s) x^n / (x^n + s), n > 0, s > 0.
  static Crf sigmoid(double n, double s);
  // Uniformly spaced samples on [0, 1], piecewise-linear in between. Must be
  // strictly increasing; endpoints are normalized to 0 and 1.
  static Crf table(std::vector<double> samples);

  Family family() const { return family_; }
  // gamma: {g}; sigmoid: {n, s}; table: the normalized samples.
  const std::vector<double>& parameters() const { return params_; }

  double apply(double v) const;
  double inverse(double v) const;

  // "gamma:0.4545", "sigmoid:0.9,0.6", "table:<n samples>".
  std::string describe() const;

 private:
  Crf(Family family, std::vector<double> params) : family_(family), params_(std::move(params)) {}

  Family family_;
  std::vector<double> params_;
};

// "identity", "srgb", "gamma:<g>", "sigmoid:<n>,<s>" or "table:<path>" where
// the file holds whitespace- or comma-separated samples.
Crf parse_crf(std::string_view spec);

////////////////////////////////////////////////////////////////////////////////
// Exposure

struct ExposureRange {
  double ev_min = 0.0;  // stops
  double ev_max = 0.0;
};

// Bounds of exposures that keep the image usable:
//   ev_max: largest ev at which at most sat_frac of the pixel luminances reach
//           the clip level 1.0 after scaling by 2^ev. Reaching 1.0 counts as
//           clipped, so the bound is the supremum minus kEvEpsilon;
//   ev_min: smallest ev at which at most dark_frac of the luminances stay below
//           2^-8 after scaling.
// Both are read off the sorted luminances. When the image's dynamic range
// makes the interval empty, ev_min collapses onto ev_max. Luminance zero never
// clips; if too few pixels are non-zero the bound is capped at +/-kEvLimit.
// RangeError for an all-zero image.
ExposureRange estimate_exposure_range(const LinearImage& hdr, double sat_frac = 0.05,
                                      double dark_frac = 0.10);

inline constexpr double kEvLimit = 40.0;
inline constexpr double kEvEpsilon = 1e-9;

struct NoiseParams {
  double sigma_read = 0.0;   // std-dev in linear [0, 1] units
  double sigma_lo = 0.0;     // dataset sampling interval for sigma_read
  double sigma_hi = 0.01;
};

// Pre-clip stage: hdr * 2^ev plus i.i.d. Gaussian noise. The noise for
// component k of pixel i depends only on (seed, 3 i + k).
RgbField expose(const LinearImage& hdr, double ev, double sigma, std::uint64_t seed);

// Clip to [0, 1], apply the CRF, quantize round(255 v) with ties rounding up.
Ldr8Image develop(const RgbField& exposed, const Crf& crf);

// expose -> clip -> CRF -> quantize. Deterministic for a given seed.
Ldr8Image simulate_ldr(const LinearImage& hdr, double ev, const Crf& crf, const NoiseParams& noise,
                       std::uint64_t seed);

////////////////////////////////////////////////////////////////////////////////
// Dataset generation

struct CropWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

struct SynthesisRecord {
  std::string source;       // file name inside the source directory
  int index = 0;            // pair index for this source
  CropWindow crop;
  double ev = 0.0;
  std::string crf_family;   // gamma, sigmoid or table
  std::vector<double> crf_parameters;
  double sigma = 0.0;
  std::uint64_t seed = 0;   // noise seed passed to simulate_ldr
  std::string ldr_file;     // relative to the output directory
  std::string hdr_file;
};

enum class CropMode { kCenter, kRandom };

struct SynthesisConfig {
  double sat_frac = 0.05;
  double dark_frac = 0.10;
  double sigma_lo = 0.0;
  double sigma_hi = 0.01;
  // "gamma", "sigmoid" or "table".
  std::string crf_family = "sigmoid";
  double gamma_lo = 1.0 / 2.6;
  double gamma_hi = 1.0 / 1.8;
  double sigmoid_n_lo = 0.7;
  double sigmoid_n_hi = 1.1;
  double sigmoid_s_lo = 0.4;
  double sigmoid_s_hi = 0.8;
  std::optional<Crf> crf_table;  // used when crf_family == "table"
  int crop = 0;                  // square crop side; 0 keeps the full image
  CropMode crop_mode = CropMode::kRandom;
  std::string ldr_format = "png";  // png, ppm or jpg
  int jpeg_quality = 90;
  std::string hdr_format = "hdr";  // hdr or pfm
  int jobs = 1;
};

struct SynthesisFailure {
  std::string source;
  std::string message;
};

struct SynthesisResult {
  std::vector<SynthesisRecord> records;  // sorted by (source, index)
  std::vector<SynthesisFailure> failures;
};

// Seed for pair `index` of `source`, independent of iteration order.
std::uint64_t pair_seed(std::uint64_t master_seed, std::string_view source, int index);

// Reads every .hdr/.pfm in hdr_dir, writes <out>/ldr/<stem>_<index>.<ext>,
// <out>/hdr/<stem>_<index>.<hdr_format> and <out>/manifest.jsonl. The HDR
// target of each pair is the crop scaled by 2^ev, so 1.0 is the LDR clip level.
SynthesisResult generate_dataset(const std::filesystem::path& hdr_dir, int count_per_image,
                                 const SynthesisConfig& config, std::uint64_t master_seed,
                                 const std::filesystem::path& out_dir);

// Re-renders the LDR of a record from its (already cropped) source.
Ldr8Image replay(const SynthesisRecord& record, const LinearImage& cropped_source);

Crf crf_from_record(const SynthesisRecord& record);

std::string record_to_json_line(const SynthesisRecord& record);
SynthesisRecord record_from_json_line(const std::string& line);

LinearImage crop(const LinearImage& image, const CropWindow& window);

}  // namespace itm

#endif  // ITM_CAMERA_SIM_H
