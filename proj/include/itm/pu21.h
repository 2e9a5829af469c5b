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

#ifndef ITM_PU21_H
#define ITM_PU21_H

#include <array>
#include <filesystem>
#include <string>

namespace itm {

// PU21 rational-power fit mapping absolute luminance (cd/m²) to perceptually
// uniform units:
//
//   V(Y) = scale * (((a + b Y^n) / (1 + c Y^n))^e - offset)
//
// Coefficients are stored in the reference ordering
// [a, b, c, n, e, offset, scale].
struct PuEncoding {
  std::string variant;
  std::array<double, 7> coefficients{};
  double y_min = 0.005;
  double y_max = 10000.0;

  // Default "banding + glare" fit.
  static PuEncoding banding_glare();
  static PuEncoding named(const std::string& variant);

  // Clamps y to [y_min, y_max]. Non-finite y is a DomainError.
  double encode(double y) const;
  // Inverse of encode on [encode(y_min), encode(y_max)].
  double decode(double v) const;

  // Strict monotonicity on a 10^4-point log grid and encode(y_min) within
  // 1e-3 of zero. Throws ValidationError.
  void validate() const;
};

// JSON: {"variant": "...", "coefficients": [7 numbers], "y_min": .., "y_max": ..}
PuEncoding load_pu_encoding(const std::filesystem::path& path);
PuEncoding parse_pu_encoding(const std::string& json_text);

inline double pu_encode(double y, const PuEncoding& enc) { return enc.encode(y); }

}  // namespace itm

#endif  // ITM_PU21_H
