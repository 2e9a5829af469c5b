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

#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "itm/error.h"
#include "itm/image_io.h"

namespace itm {

namespace {

// Header tokens are separated by whitespace; the single whitespace byte after
// the scale token starts the raster.
class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  std::string token() {
    while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      if (pos_ - start > 64) throw ParseError("PFM header token too long", pos_);
      ++pos_;
    }
    if (pos_ == start) throw ParseError("truncated PFM header", pos_);
    return std::string(bytes_.begin() + start, bytes_.begin() + pos_);
  }

  void skip_one_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("expected whitespace after PFM header", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

long parse_dimension(const std::string& token, std::size_t offset) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    throw ParseError("invalid PFM dimension '" + token + "'", offset);
  }
  if (used != token.size()) throw ParseError("invalid PFM dimension '" + token + "'", offset);
  if (value <= 0 || value > (1 << 20)) {
    throw ParseError("PFM dimensions must be positive, got '" + token + "'", offset);
  }
  return value;
}

std::uint32_t load_u32(const std::uint8_t* p, Endian endian) {
  if (endian == Endian::kLittle) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 |
           std::uint32_t{p[3]} << 24;
  }
  return std::uint32_t{p[3]} | std::uint32_t{p[2]} << 8 | std::uint32_t{p[1]} << 16 |
         std::uint32_t{p[0]} << 24;
}

void store_u32(std::uint8_t* p, std::uint32_t v, Endian endian) {
  for (int i = 0; i < 4; ++i) {
    const int shift = endian == Endian::kLittle ? 8 * i : 8 * (3 - i);
    p[i] = static_cast<std::uint8_t>(v >> shift);
  }
}

}  // namespace

LinearImage decode_pfm(std::span<const std::uint8_t> bytes) {
  HeaderScanner in(bytes);
  const std::string magic = in.token();
  if (magic == "Pf") throw ParseError("single-channel PFM is not supported", 0);
  if (magic != "PF") throw ParseError("bad PFM magic '" + magic.substr(0, 8) + "'", 0);

  std::size_t at = in.offset();
  const long width = parse_dimension(in.token(), at);
  at = in.offset();
  const long height = parse_dimension(in.token(), at);
  at = in.offset();
  const std::string scale_token = in.token();
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_token, &used);
    if (used != scale_token.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ParseError("invalid PFM scale '" + scale_token + "'", at);
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw ParseError("PFM scale must be non-zero", at);
  const Endian endian = scale < 0.0 ? Endian::kLittle : Endian::kBig;
  in.skip_one_whitespace();

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  const std::size_t start = in.offset();
  if (bytes.size() - start < count * 4) {
    throw ParseError("PFM raster truncated: need " + std::to_string(count * 4) + " bytes, have " +
                         std::to_string(bytes.size() - start),
                     bytes.size());
  }

  std::vector<float> data(count);
  const std::size_t row = static_cast<std::size_t>(width) * 3;
  for (long y = 0; y < height; ++y) {
    // Rows are stored bottom-to-top.
    const std::uint8_t* src = bytes.data() + start + static_cast<std::size_t>(y) * row * 4;
    float* dst = data.data() + static_cast<std::size_t>(height - 1 - y) * row;
    for (std::size_t i = 0; i < row; ++i) {
      const float v = std::bit_cast<float>(load_u32(src + 4 * i, endian));
      if (!(v >= 0.0f) || !std::isfinite(v)) {
        throw ParseError("PFM sample is negative or non-finite",
                         start + (static_cast<std::size_t>(y) * row + i) * 4);
      }
      dst[i] = v;
    }
  }
  return LinearImage(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

Bytes encode_pfm(const LinearImage& image, Endian endian) {
  const std::string header = "PF\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" +
                             (endian == Endian::kLittle ? "-1.0" : "1.0") + "\n";
  Bytes out(header.begin(), header.end());
  const std::size_t row = static_cast<std::size_t>(image.width()) * 3;
  const std::size_t start = out.size();
  out.resize(start + image.data().size() * 4);
  const auto data = image.data();
  for (int y = 0; y < image.height(); ++y) {
    const float* src = data.data() + static_cast<std::size_t>(image.height() - 1 - y) * row;
    std::uint8_t* dst = out.data() + start + static_cast<std::size_t>(y) * row * 4;
    for (std::size_t i = 0; i < row; ++i) store_u32(dst + 4 * i, std::bit_cast<std::uint32_t>(src[i]), endian);
  }
  return out;
}

LinearImage read_pfm(const std::filesystem::path& path) { return decode_pfm(read_file_bytes(path)); }

void write_pfm(const LinearImage& image, const std::filesystem::path& path) {
  write_file_bytes(path, encode_pfm(image));
}

}  // namespace itm
