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

#ifndef ITM_CONFIG_H
#define ITM_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "itm/camera_sim.h"
#include "itm/color_transfer.h"
#include "itm/pu21.h"
#include "itm/sde.h"

namespace itm {

struct SdeSection {
  std::string schedule = "cosine";  // cosine or constant
  std::size_t steps = 100;
  double lambda = 50.0 / 255.0;     // cosine: stationary deviation
  double theta = 1.0;               // constant: drift
  double sigma = 0.0;               // constant: diffusion
  double dt = 0.01;                 // constant: step size

  SdeSchedule build() const;
};

struct AnalysisSection {
  double quantile = 0.85;
  int joint_bins = 32;
};

struct Config {
  DisplayMapping display;
  SynthesisConfig synth;
  int synth_count = 1;  // pairs per source image
  PuEncoding encoding = PuEncoding::banding_glare();
  SdeSection sde;
  AnalysisSection analysis;
  std::optional<std::uint64_t> seed;  // [seeds] master, overridden by --seed
};

// INI text with sections [display], [synth], [score], [sde], [analysis] and
// [seeds]. Unknown sections or keys, keys outside a section and malformed
// values raise ConfigError. Relative paths resolve against base_dir.
Config parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

}  // namespace itm

#endif  // ITM_CONFIG_H
