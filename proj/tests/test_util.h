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

#ifndef ITM_TESTS_TEST_UTIL_H
#define ITM_TESTS_TEST_UTIL_H

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "itm/image.h"
#include "itm/rng.h"

namespace itm::test {

inline LinearImage random_image(int w, int h, std::uint64_t seed, double lo = 0.0,
                                double hi = 1.0) {
  RandomStream rng(seed);
  std::vector<float> data(static_cast<std::size_t>(w) * h * 3);
  for (float& v : data) v = static_cast<float>(rng.uniform(lo, hi));
  return LinearImage(w, h, std::move(data));
}

// Log-uniform radiance over [2^lo_stop, 2^hi_stop].
inline LinearImage random_hdr(int w, int h, std::uint64_t seed, double lo_stop = -8.0,
                              double hi_stop = 4.0) {
  RandomStream rng(seed);
  std::vector<float> data(static_cast<std::size_t>(w) * h * 3);
  for (float& v : data) v = static_cast<float>(std::exp2(rng.uniform(lo_stop, hi_stop)));
  return LinearImage(w, h, std::move(data));
}

inline Ldr8Image random_ldr(int w, int h, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
  return Ldr8Image(w, h, std::move(data));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("itm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static std::uint64_t& counter() {
    static std::uint64_t c = 0;
    return c;
  }
  std::filesystem::path path_;
};

}  // namespace itm::test

#endif  // ITM_TESTS_TEST_UTIL_H
