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

#include "itm/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "itm/error.h"

namespace itm {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw ConfigError("config: " + key + " = '" + value + "' is not " + want);
}

double as_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite number");
  }
  return out;
}

long long as_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t as_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    bad_value(key, v, "an unsigned integer");
  }
  return out;
}

// "lo,hi"
std::pair<double, double> as_range(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) bad_value(key, v, "a 'lo,hi' range");
  const double lo = as_double(key, trim(v.substr(0, comma)));
  const double hi = as_double(key, trim(v.substr(comma + 1)));
  if (lo > hi) bad_value(key, v, "an ordered 'lo,hi' range");
  return {lo, hi};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  const std::filesystem::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

using Setter = std::function<void(Config&, const std::string& key, const std::string& value)>;
using Section = std::map<std::string, Setter>;

std::map<std::string, Section> schema(const std::filesystem::path& base) {
  std::map<std::string, Section> s;
  s["display"] = {
      {"peak", [](Config& c, auto& k, auto& v) { c.display.peak_luminance = as_double(k, v); }},
      {"floor", [](Config& c, auto& k, auto& v) { c.display.black_floor = as_double(k, v); }},
      {"reference_white",
       [](Config& c, auto& k, auto& v) { c.display.reference_white = as_double(k, v); }},
  };
  s["synth"] = {
      {"sat_frac", [](Config& c, auto& k, auto& v) { c.synth.sat_frac = as_double(k, v); }},
      {"dark_frac", [](Config& c, auto& k, auto& v) { c.synth.dark_frac = as_double(k, v); }},
      {"sigma_range",
       [](Config& c, auto& k, auto& v) {
         std::tie(c.synth.sigma_lo, c.synth.sigma_hi) = as_range(k, v);
       }},
      {"crf",
       [base](Config& c, auto& k, auto& v) {
         if (v == "gamma" || v == "sigmoid") {
           c.synth.crf_family = v;
         } else if (v.rfind("table:", 0) == 0) {
           c.synth.crf_family = "table";
           c.synth.crf_table = parse_crf("table:" + resolve(base, v.substr(6)).string());
         } else {
           bad_value(k, v, "one of gamma, sigmoid, table:<path>");
         }
       }},
      {"gamma_range",
       [](Config& c, auto& k, auto& v) {
         std::tie(c.synth.gamma_lo, c.synth.gamma_hi) = as_range(k, v);
       }},
      {"sigmoid_n_range",
       [](Config& c, auto& k, auto& v) {
         std::tie(c.synth.sigmoid_n_lo, c.synth.sigmoid_n_hi) = as_range(k, v);
       }},
      {"sigmoid_s_range",
       [](Config& c, auto& k, auto& v) {
         std::tie(c.synth.sigmoid_s_lo, c.synth.sigmoid_s_hi) = as_range(k, v);
       }},
      {"crop", [](Config& c, auto& k, auto& v) { c.synth.crop = static_cast<int>(as_int(k, v)); }},
      {"crop_mode",
       [](Config& c, auto& k, auto& v) {
         if (v == "center") c.synth.crop_mode = CropMode::kCenter;
         else if (v == "random") c.synth.crop_mode = CropMode::kRandom;
         else bad_value(k, v, "center or random");
       }},
      {"format",
       [](Config& c, auto& k, auto& v) {
         if (v != "png" && v != "ppm" && v != "jpg") bad_value(k, v, "png, ppm or jpg");
         c.synth.ldr_format = v;
       }},
      {"jpeg_quality",
       [](Config& c, auto& k, auto& v) {
         const auto q = as_int(k, v);
         if (q < 1 || q > 100) bad_value(k, v, "in [1, 100]");
         c.synth.jpeg_quality = static_cast<int>(q);
       }},
      {"hdr_format",
       [](Config& c, auto& k, auto& v) {
         if (v != "hdr" && v != "pfm") bad_value(k, v, "hdr or pfm");
         c.synth.hdr_format = v;
       }},
      {"count",
       [](Config& c, auto& k, auto& v) {
         const auto n = as_int(k, v);
         if (n < 1) bad_value(k, v, ">= 1");
         c.synth_count = static_cast<int>(n);
       }},
  };
  s["score"] = {
      {"pu",
       [base](Config& c, auto&, auto& v) {
         if (v.find('/') == std::string::npos && v.find(".json") == std::string::npos) {
           c.encoding = PuEncoding::named(v);
         } else {
           c.encoding = load_pu_encoding(resolve(base, v));
         }
       }},
  };
  s["sde"] = {
      {"schedule",
       [](Config& c, auto& k, auto& v) {
         if (v != "cosine" && v != "constant") bad_value(k, v, "cosine or constant");
         c.sde.schedule = v;
       }},
      {"steps",
       [](Config& c, auto& k, auto& v) {
         const auto n = as_int(k, v);
         if (n < 1) bad_value(k, v, ">= 1");
         c.sde.steps = static_cast<std::size_t>(n);
       }},
      {"lambda", [](Config& c, auto& k, auto& v) { c.sde.lambda = as_double(k, v); }},
      {"theta", [](Config& c, auto& k, auto& v) { c.sde.theta = as_double(k, v); }},
      {"sigma", [](Config& c, auto& k, auto& v) { c.sde.sigma = as_double(k, v); }},
      {"dt", [](Config& c, auto& k, auto& v) { c.sde.dt = as_double(k, v); }},
  };
  s["analysis"] = {
      {"quantile", [](Config& c, auto& k, auto& v) { c.analysis.quantile = as_double(k, v); }},
      {"joint_bins",
       [](Config& c, auto& k, auto& v) {
         const auto n = as_int(k, v);
         if (n < 1) bad_value(k, v, ">= 1");
         c.analysis.joint_bins = static_cast<int>(n);
       }},
  };
  s["seeds"] = {
      {"master", [](Config& c, auto& k, auto& v) { c.seed = as_u64(k, v); }},
  };
  return s;
}

}  // namespace

SdeSchedule SdeSection::build() const {
  try {
    if (schedule == "cosine") return SdeSchedule::cosine(steps, lambda);
    return SdeSchedule::constant(steps, theta, sigma, dt);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: [sde] ") + e.what());
  }
}

Config parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto sections = schema(base_dir);
  Config config;
  for (const auto& [name, section] : tree) {
    if (section.empty()) {
      throw ConfigError("config: key '" + name + "' is outside a section");
    }
    const auto known = sections.find(name);
    if (known == sections.end()) throw ConfigError("config: unknown section [" + name + "]");
    for (const auto& [key, node] : section) {
      const auto setter = known->second.find(key);
      if (setter == known->second.end()) {
        throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
      }
      try {
        setter->second(config, name + "." + key, trim(node.data()));
      } catch (const ConfigError&) {
        throw;
      } catch (const Error& e) {
        throw ConfigError("config: " + name + "." + key + ": " + e.what());
      }
    }
  }
  try {
    config.display.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config: [display] ") + e.what());
  }
  config.sde.build();  // schedule errors surface at load time
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace itm
