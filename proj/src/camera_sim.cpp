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

#include "itm/camera_sim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "itm/color_transfer.h"
#include "itm/error.h"
#include "itm/rng.h"

namespace itm {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + ": input must lie in [0, 1], got " + std::to_string(v));
  }
}

// 2^ev with the integer part applied by ldexp, so ev + 1 doubles exactly.
double stops_to_scale(double ev) {
  const double whole = std::floor(ev);
  return std::ldexp(std::exp2(ev - whole), static_cast<int>(whole));
}

}  // namespace

////////////////////////////////////////////////////////////////////////////////
// Crf

Crf Crf::gamma(double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("gamma CRF requires g > 0");
  return Crf(Family::kGamma, {g});
}

Crf Crf::sigmoid(double n, double s) {
  if (!(n > 0.0) || !(s > 0.0) || !std::isfinite(n) || !std::isfinite(s)) {
    throw ValidationError("sigmoid CRF requires n > 0 and s > 0");
  }
  return Crf(Family::kSigmoid, {n, s});
}

Crf Crf::table(std::vector<double> samples) {
  if (samples.size() < 2) throw ValidationError("CRF table needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) throw ValidationError("CRF table holds a non-finite sample");
    if (i > 0 && !(samples[i] > samples[i - 1])) {
      throw ValidationError("CRF table is not strictly increasing at sample " + std::to_string(i));
    }
  }
  const double lo = samples.front();
  const double span = samples.back() - lo;
  for (double& v : samples) v = (v - lo) / span;
  samples.front() = 0.0;
  samples.back() = 1.0;
  return Crf(Family::kTable, std::move(samples));
}

double Crf::apply(double v) const {
  require_unit(v, "crf_apply");
  switch (family_) {
    case Family::kGamma:
      return std::pow(v, params_[0]);
    case Family::kSigmoid: {
      const double xn = std::pow(v, params_[0]);
      return (1.0 + params_[1]) * xn / (xn + params_[1]);
    }
    case Family::kTable: {
      const double pos = v * static_cast<double>(params_.size() - 1);
      const std::size_t i = std::min(static_cast<std::size_t>(pos), params_.size() - 2);
      const double t = pos - static_cast<double>(i);
      return params_[i] + t * (params_[i + 1] - params_[i]);
    }
  }
  return v;
}

double Crf::inverse(double v) const {
  require_unit(v, "crf_inverse");
  switch (family_) {
    case Family::kGamma:
      return std::pow(v, 1.0 / params_[0]);
    case Family::kSigmoid: {
      const double s = params_[1];
      return std::min(std::pow(s * v / (1.0 + s - v), 1.0 / params_[0]), 1.0);
    }
    case Family::kTable: {
      // First sample strictly above v bounds the segment.
      const auto upper = std::upper_bound(params_.begin(), params_.end(), v);
      if (upper == params_.end()) return 1.0;
      const std::size_t i = static_cast<std::size_t>(upper - params_.begin()) - 1;
      const double t = (v - params_[i]) / (params_[i + 1] - params_[i]);
      return (static_cast<double>(i) + t) / static_cast<double>(params_.size() - 1);
    }
  }
  return v;
}

std::string Crf::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (family_) {
    case Family::kGamma:
      out << "gamma:" << params_[0];
      break;
    case Family::kSigmoid:
      out << "sigmoid:" << params_[0] << "," << params_[1];
      break;
    case Family::kTable:
      out << "table:<" << params_.size() << " samples>";
      break;
  }
  return out.str();
}

Crf parse_crf(std::string_view spec) {
  const std::string text(spec);
  auto number = [&](const std::string& token) {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("invalid number '" + token + "' in CRF spec '" + text + "'");
    }
  };
  if (text == "identity") return Crf::identity();
  if (text == "srgb") {
    std::vector<double> samples(1024);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = linear_to_srgb(static_cast<double>(i) / (samples.size() - 1));
    }
    return Crf::table(std::move(samples));
  }
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("unknown CRF spec '" + text + "'");
  const std::string family = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  if (family == "gamma") return Crf::gamma(number(args));
  if (family == "sigmoid") {
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw ConfigError("sigmoid CRF spec needs '<n>,<s>'");
    return Crf::sigmoid(number(args.substr(0, comma)), number(args.substr(comma + 1)));
  }
  if (family == "table") {
    std::ifstream in(args);
    if (!in) throw ConfigError("cannot open CRF table '" + args + "'");
    std::stringstream content;
    content << in.rdbuf();
    std::string body = content.str();
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream tokens(body);
    std::vector<double> samples;
    std::string token;
    while (tokens >> token) samples.push_back(number(token));
    return Crf::table(std::move(samples));
  }
  throw ConfigError("unknown CRF family '" + family + "'");
}

////////////////////////////////////////////////////////////////////////////////
// Exposure

ExposureRange estimate_exposure_range(const LinearImage& hdr, double sat_frac, double dark_frac) {
  if (!(sat_frac > 0.0 && sat_frac < 1.0) || !(dark_frac > 0.0 && dark_frac < 1.0)) {
    throw DomainError("exposure range fractions must lie in (0, 1)");
  }
  const ScalarField lum = luminance(hdr);
  std::vector<double> sorted(lum.values().begin(), lum.values().end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() <= 0.0) throw RangeError("cannot estimate exposure range of an all-black image");

  const std::size_t n = sorted.size();
  // Pixel counts allowed to clip / stay dark. The small slack keeps products
  // such as 0.29 * 100 from flooring one short.
  const auto allowed = [n](double frac) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
  };

  ExposureRange range;
  const std::size_t clip_budget = allowed(sat_frac);
  range.ev_max = kEvLimit;
  if (clip_budget < n) {
    // The (budget + 1)-th brightest pixel must stay below 1.0.
    const double pivot = sorted[n - 1 - clip_budget];
    if (pivot > 0.0) range.ev_max = -std::log2(pivot) - kEvEpsilon;
  }

  const std::size_t dark_budget = allowed(dark_frac);
  range.ev_min = -kEvLimit;
  if (dark_budget < n) {
    // The (budget + 1)-th darkest pixel must reach 2^-8.
    const double pivot = sorted[dark_budget];
    range.ev_min = pivot > 0.0 ? -8.0 - std::log2(pivot) : kEvLimit;
  }

  range.ev_max = std::clamp(range.ev_max, -kEvLimit, kEvLimit);
  range.ev_min = std::clamp(range.ev_min, -kEvLimit, kEvLimit);
  if (range.ev_min > range.ev_max) range.ev_min = range.ev_max;
  return range;
}

RgbField expose(const LinearImage& hdr, double ev, double sigma, std::uint64_t seed) {
  if (!std::isfinite(ev)) throw DomainError("exposure must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise sigma must be >= 0");
  const double scale = stops_to_scale(ev);
  RgbField out(hdr);
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= scale;
    if (sigma > 0.0) values[i] += sigma * keyed_normal(derive_seed(seed, i));
  }
  return out;
}

Ldr8Image develop(const RgbField& exposed, const Crf& crf) {
  Ldr8Image out(exposed.width(), exposed.height());
  const auto src = exposed.values();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double clipped = std::clamp(src[i], 0.0, 1.0);
    const double code = std::floor(255.0 * crf.apply(clipped) + 0.5);
    dst[i] = static_cast<std::uint8_t>(std::clamp(code, 0.0, 255.0));
  }
  return out;
}

Ldr8Image simulate_ldr(const LinearImage& hdr, double ev, const Crf& crf, const NoiseParams& noise,
                       std::uint64_t seed) {
  return develop(expose(hdr, ev, noise.sigma_read, seed), crf);
}

}  // namespace itm
