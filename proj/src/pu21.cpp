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

#include "itm/pu21.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "itm/error.h"

namespace itm {

PuEncoding PuEncoding::banding_glare() {
  return named("banding_glare");
}

PuEncoding PuEncoding::named(const std::string& variant) {
  PuEncoding enc;
  enc.variant = variant;
  if (variant == "banding") {
    enc.coefficients = {1.070275272, 0.4088273932, 0.153224308, 0.2520326168,
                        1.063512885, 1.14115047,   521.4527484};
  } else if (variant == "banding_glare") {
    enc.coefficients = {0.353487901, 0.3734658629, 8.277049286e-05, 0.9062562627,
                        0.09150303166, 0.9099517204, 596.3148142};
  } else if (variant == "peaks") {
    enc.coefficients = {1.043882782, 0.6459495343, 0.3194584211, 0.374025247,
                        1.114783422, 1.095360363,  384.9217577};
  } else if (variant == "peaks_glare") {
    enc.coefficients = {816.885024,   1479.463946, 0.001253215609, 0.9329636822,
                        0.06746643971, 1.573435413, 419.6006374};
  } else {
    throw ValidationError("unknown PU21 variant '" + variant + "'");
  }
  return enc;
}

double PuEncoding::encode(double y) const {
  if (!std::isfinite(y)) throw DomainError("pu_encode: luminance must be finite");
  const auto& p = coefficients;
  const double yc = std::clamp(y, y_min, y_max);
  const double yn = std::pow(yc, p[3]);
  return p[6] * (std::pow((p[0] + p[1] * yn) / (1.0 + p[2] * yn), p[4]) - p[5]);
}

double PuEncoding::decode(double v) const {
  if (!std::isfinite(v)) throw DomainError("pu_decode: value must be finite");
  const auto& p = coefficients;
  const double vp = std::pow(std::max(v / p[6] + p[5], 0.0), 1.0 / p[4]);
  const double denom = p[1] - p[2] * vp;
  if (!(denom > 0.0)) return y_max;
  const double y = std::pow(std::max(vp - p[0], 0.0) / denom, 1.0 / p[3]);
  return std::clamp(y, y_min, y_max);
}

void PuEncoding::validate() const {
  if (!(y_min > 0.0 && y_min < y_max)) throw ValidationError("PU21: require 0 < y_min < y_max");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw ValidationError("PU21: non-finite coefficient");
  }
  const double at_min = encode(y_min);
  if (!(std::abs(at_min) <= 1e-3)) {
    throw ValidationError("PU21: encode(y_min) = " + std::to_string(at_min) + " is not anchored at 0");
  }
  constexpr int kGrid = 10000;
  const double lo = std::log10(y_min);
  const double hi = std::log10(y_max);
  double previous = at_min;
  for (int i = 1; i < kGrid; ++i) {
    const double y = std::pow(10.0, lo + (hi - lo) * i / (kGrid - 1));
    const double v = encode(y);
    if (!(v > previous)) {
      throw ValidationError("PU21: encoding is not strictly increasing near " + std::to_string(y) +
                            " cd/m2");
    }
    previous = v;
  }
}

PuEncoding parse_pu_encoding(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("PU21 coefficients: ") + e.what());
  }
  PuEncoding enc;
  try {
    enc.variant = doc.at("variant").get<std::string>();
    const auto& coeffs = doc.at("coefficients");
    if (!coeffs.is_array() || coeffs.size() != 7) {
      throw ConfigError("PU21 coefficients: expected 7 coefficients");
    }
    for (std::size_t i = 0; i < 7; ++i) enc.coefficients[i] = coeffs[i].get<double>();
    enc.y_min = doc.value("y_min", enc.y_min);
    enc.y_max = doc.value("y_max", enc.y_max);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("PU21 coefficients: ") + e.what());
  }
  enc.validate();
  return enc;
}

PuEncoding load_pu_encoding(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open PU21 coefficients '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_pu_encoding(text.str());
}

}  // namespace itm
