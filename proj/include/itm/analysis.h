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

#ifndef ITM_ANALYSIS_H
#define ITM_ANALYSIS_H

#include <cstddef>
#include <cstdint>
#include <vector>

#include "itm/color_transfer.h"
#include "itm/image.h"
#include "itm/pu21.h"

namespace itm {

// |PU(pred) - PU(gt)| per pixel on display-mapped luminance.
ScalarField error_map(const LinearImage& pred, const LinearImage& gt, const PuEncoding& enc,
                      const DisplayMapping& dm = {});

// Rec. 709 luminance of the 8-bit code values scaled to [0, 1].
ScalarField ldr_luminance(const Ldr8Image& ldr);

struct SaturationSplit {
  double threshold = 0.0;
  std::vector<std::uint8_t> saturated_mask;  // 1 = saturated, row-major
  double frac = 0.0;
  std::size_t saturated_count() const;
};

// threshold = sorted_luminance[min(floor(q N), N - 1)] (0-based rank), mask =
// luminance >= threshold, so ties at the threshold are saturated. q in [0, 1].
SaturationSplit saturation_split(const Ldr8Image& ldr_input, double q = 0.85);

struct RegionStats {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;  // nearest rank: sorted[ceil(p n) - 1]
  double p95 = 0.0;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
};

struct ErrorStats {
  RegionStats saturated;
  RegionStats non_saturated;
  Histogram histogram;  // all pixels, 64 bins over [0, max error]
};

inline constexpr int kErrorHistogramBins = 64;

ErrorStats error_stats(const ScalarField& error_map, const SaturationSplit& split);

// Equal-width bins: LDR luminance over [0, 1], error over [0, max error].
// The top edge of each axis falls into the last bin.
struct JointHistogram {
  int intensity_bins = 0;
  int error_bins = 0;
  std::vector<double> intensity_edges;
  std::vector<double> error_edges;
  std::vector<std::size_t> counts;  // [intensity][error], row-major

  std::size_t at(int intensity_bin, int error_bin) const {
    return counts[static_cast<std::size_t>(intensity_bin) * error_bins + error_bin];
  }
  std::size_t total() const;
};

JointHistogram intensity_error_joint(const Ldr8Image& ldr_input, const ScalarField& error_map,
                                     int bins);

}  // namespace itm

#endif  // ITM_ANALYSIS_H
