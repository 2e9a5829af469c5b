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
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "itm/error.h"
#include "itm/image_io.h"

namespace itm {

namespace {

constexpr int kExponentBias = 128;
constexpr int kMinRleWidth = 8;
constexpr int kMaxRleWidth = 0x7fff;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint8_t byte(const char* what) {
    if (pos_ >= bytes_.size()) throw ParseError(std::string("truncated ") + what, pos_);
    return bytes_[pos_++];
  }

  // Reads up to and excluding '\n'. Lines longer than 4 KiB are malformed.
  std::string line() {
    std::string out;
    while (true) {
      if (pos_ >= bytes_.size()) throw ParseError("truncated header", pos_);
      const char c = static_cast<char>(bytes_[pos_++]);
      if (c == '\n') return out;
      if (out.size() >= 4096) throw ParseError("header line too long", pos_);
      out.push_back(c);
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void store(LinearImage& image, std::size_t index, const RgbePixel& p) {
  image.set_pixel(index, rgbe_decode(p));
}

// Old-style scanline: flat pixels, where (1,1,1,n) repeats the previous pixel
// n << shift times and shift grows by 8 for consecutive repeat codes.
void read_flat_scanline(Reader& in, std::vector<RgbePixel>& line, int width,
                        const RgbePixel* first) {
  int x = 0;
  int shift = 0;
  auto next = [&](RgbePixel p) {
    if (p.r == 1 && p.g == 1 && p.b == 1) {
      if (x == 0) throw ParseError("run-length repeat with no previous pixel", in.offset());
      if (shift > 16) throw ParseError("run-length repeat count overflow", in.offset());
      const long count = static_cast<long>(p.e) << shift;
      if (count > width - x) throw ParseError("run-length repeat overruns scanline", in.offset());
      for (long i = 0; i < count; ++i, ++x) line[x] = line[x - 1];
      shift += 8;
    } else {
      line[x++] = p;
      shift = 0;
    }
  };
  if (first != nullptr) next(*first);
  while (x < width) {
    RgbePixel p;
    p.r = in.byte("scanline");
    p.g = in.byte("scanline");
    p.b = in.byte("scanline");
    p.e = in.byte("scanline");
    next(p);
  }
}

void read_rle_scanline(Reader& in, std::vector<RgbePixel>& line, int width) {
  std::vector<std::uint8_t> channel(static_cast<std::size_t>(width));
  for (int c = 0; c < 4; ++c) {
    int x = 0;
    while (x < width) {
      const std::uint8_t code = in.byte("run-length scanline");
      if (code > 128) {
        const int count = code - 128;
        if (count > width - x) throw ParseError("run overruns scanline", in.offset());
        const std::uint8_t value = in.byte("run-length scanline");
        std::fill_n(channel.begin() + x, count, value);
        x += count;
      } else {
        if (code == 0) throw ParseError("zero-length literal run", in.offset());
        if (code > width - x) throw ParseError("literal run overruns scanline", in.offset());
        for (int i = 0; i < code; ++i) channel[x++] = in.byte("run-length scanline");
      }
    }
    for (int i = 0; i < width; ++i) {
      std::uint8_t* dst = c == 0 ? &line[i].r : c == 1 ? &line[i].g : c == 2 ? &line[i].b : &line[i].e;
      *dst = channel[i];
    }
  }
}

void read_scanline(Reader& in, std::vector<RgbePixel>& line, int width) {
  if (width < kMinRleWidth || width > kMaxRleWidth) {
    read_flat_scanline(in, line, width, nullptr);
    return;
  }
  RgbePixel head;
  head.r = in.byte("scanline");
  head.g = in.byte("scanline");
  head.b = in.byte("scanline");
  head.e = in.byte("scanline");
  if (head.r != 2 || head.g != 2 || (head.b & 0x80) != 0) {
    read_flat_scanline(in, line, width, &head);
    return;
  }
  const int encoded_width = (head.b << 8) | head.e;
  if (encoded_width != width) {
    throw ParseError("run-length scanline width " + std::to_string(encoded_width) +
                         " does not match image width " + std::to_string(width),
                     in.offset());
  }
  read_rle_scanline(in, line, width);
}

void append_rle_channel(Bytes& out, const std::vector<std::uint8_t>& data) {
  constexpr std::size_t kMinRun = 4;
  const std::size_t n = data.size();
  std::size_t cur = 0;
  while (cur < n) {
    // Find the next run of at least kMinRun equal bytes.
    std::size_t beg_run = cur;
    std::size_t run_count = 0;
    while (run_count < kMinRun && beg_run < n) {
      beg_run += run_count;
      run_count = 1;
      while (beg_run + run_count < n && run_count < 127 &&
             data[beg_run] == data[beg_run + run_count]) {
        ++run_count;
      }
    }
    if (run_count < kMinRun) beg_run = n;
    // A short run just before the long one is cheaper as a run code.
    if (beg_run - cur > 1 && beg_run - cur < kMinRun) {
      std::size_t count = 1;
      while (cur + count < beg_run && data[cur + count] == data[cur]) ++count;
      if (cur + count == beg_run) {
        out.push_back(static_cast<std::uint8_t>(128 + count));
        out.push_back(data[cur]);
        cur = beg_run;
      }
    }
    while (cur < beg_run) {
      const std::size_t count = std::min<std::size_t>(beg_run - cur, 128);
      out.push_back(static_cast<std::uint8_t>(count));
      out.insert(out.end(), data.begin() + cur, data.begin() + cur + count);
      cur += count;
    }
    if (run_count >= kMinRun) {
      out.push_back(static_cast<std::uint8_t>(128 + run_count));
      out.push_back(data[beg_run]);
      cur += run_count;
    }
  }
}

// Parses "-Y <h> +X <w>".
void parse_resolution(const std::string& text, std::size_t offset, int& width, int& height) {
  char ysign = 0, yaxis = 0, xsign = 0, xaxis = 0;
  long h = 0, w = 0;
  char tail = 0;
  const int n = std::sscanf(text.c_str(), " %c%c %ld %c%c %ld %c", &ysign, &yaxis, &h, &xsign,
                            &xaxis, &w, &tail);
  if (n != 6) throw ParseError("malformed resolution string '" + text + "'", offset);
  if (ysign != '-' || yaxis != 'Y' || xsign != '+' || xaxis != 'X') {
    throw ParseError("unsupported scanline orientation '" + text + "'", offset);
  }
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20)) {
    throw ParseError("invalid image dimensions in '" + text + "'", offset);
  }
  width = static_cast<int>(w);
  height = static_cast<int>(h);
}

}  // namespace

////////////////////////////////////////////////////////////////////////////////
// Pixels

RgbePixel rgbe_encode(const Rgb& rgb) {
  for (double v : rgb) {
    if (!std::isfinite(v)) throw FormatError("RGBE cannot encode non-finite component");
    if (v < 0.0) throw FormatError("RGBE cannot encode negative component");
  }
  const double max_component = std::max({rgb[0], rgb[1], rgb[2]});
  if (max_component == 0.0) return {};

  int exponent = 0;
  std::frexp(max_component, &exponent);  // max < 2^exponent
  int biased = std::max(exponent + kExponentBias, 1);
  if (biased > 255) throw FormatError("RGBE exponent overflow");

  auto mantissas = [&](int e) {
    std::array<long, 3> m{};
    for (int c = 0; c < 3; ++c) {
      m[c] = std::lround(std::ldexp(rgb[c], 8 - (e - kExponentBias)));
    }
    return m;
  };
  auto m = mantissas(biased);
  if (std::max({m[0], m[1], m[2]}) > 255) {
    // Rounding carried the largest mantissa to 256.
    if (++biased > 255) throw FormatError("RGBE exponent overflow");
    m = mantissas(biased);
  }
  if (m[0] == 0 && m[1] == 0 && m[2] == 0) return {};
  return {static_cast<std::uint8_t>(m[0]), static_cast<std::uint8_t>(m[1]),
          static_cast<std::uint8_t>(m[2]), static_cast<std::uint8_t>(biased)};
}

Rgb rgbe_decode(const RgbePixel& p) {
  if (p.e == 0) return {0.0, 0.0, 0.0};
  const int scale = p.e - kExponentBias - 8;
  return {std::ldexp(static_cast<double>(p.r), scale), std::ldexp(static_cast<double>(p.g), scale),
          std::ldexp(static_cast<double>(p.b), scale)};
}

////////////////////////////////////////////////////////////////////////////////
// Container

HdrFile decode_hdr(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  const std::string magic = in.line();
  if (magic.rfind("#?RADIANCE", 0) != 0 && magic.rfind("#?RGBE", 0) != 0) {
    throw ParseError("missing #?RADIANCE or #?RGBE magic", 0);
  }
  std::vector<std::string> attributes;
  while (true) {
    const std::size_t at = in.offset();
    std::string line = in.line();
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    if (line.rfind("FORMAT=", 0) == 0) {
      if (line != "FORMAT=32-bit_rle_rgbe") {
        throw ParseError("unsupported pixel format '" + line.substr(7) + "'", at);
      }
      continue;
    }
    attributes.push_back(std::move(line));
  }
  const std::size_t resolution_at = in.offset();
  std::string resolution = in.line();
  if (!resolution.empty() && resolution.back() == '\r') resolution.pop_back();
  int width = 0;
  int height = 0;
  parse_resolution(resolution, resolution_at, width, height);

  // Every pixel needs at least one byte even under run-length coding.
  if (in.remaining() < static_cast<std::size_t>(height)) {
    throw ParseError("pixel data shorter than image height", in.offset());
  }

  LinearImage image(width, height);
  std::vector<RgbePixel> line(static_cast<std::size_t>(width));
  for (int y = 0; y < height; ++y) {
    read_scanline(in, line, width);
    for (int x = 0; x < width; ++x) {
      store(image, static_cast<std::size_t>(y) * width + x, line[x]);
    }
  }
  return {std::move(image), std::move(attributes)};
}

Bytes encode_hdr(const LinearImage& image, std::span<const std::string> attributes) {
  std::string header = "#?RADIANCE\n";
  for (const std::string& attribute : attributes) {
    if (attribute.empty() || attribute.find('\n') != std::string::npos ||
        attribute.rfind("FORMAT=", 0) == 0) {
      throw FormatError("invalid Radiance header attribute '" + attribute + "'");
    }
    header += attribute + "\n";
  }
  header += "FORMAT=32-bit_rle_rgbe\n\n";
  header += "-Y " + std::to_string(image.height()) + " +X " + std::to_string(image.width()) + "\n";

  Bytes out(header.begin(), header.end());
  const int width = image.width();
  const bool rle = width >= kMinRleWidth && width <= kMaxRleWidth;
  std::vector<RgbePixel> line(static_cast<std::size_t>(width));
  std::array<std::vector<std::uint8_t>, 4> planes;
  for (auto& plane : planes) plane.resize(static_cast<std::size_t>(width));

  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < width; ++x) line[x] = rgbe_encode(image.at(x, y));
    if (!rle) {
      for (RgbePixel p : line) {
        // (1,1,1,n) is a repeat code in flat scanlines; use the equivalent
        // (2,2,2,n-1). At the bottom exponent the value is below float range.
        if (p.r == 1 && p.g == 1 && p.b == 1) {
          p = p.e > 1 ? RgbePixel{2, 2, 2, static_cast<std::uint8_t>(p.e - 1)} : RgbePixel{};
        }
        out.insert(out.end(), {p.r, p.g, p.b, p.e});
      }
      continue;
    }
    out.insert(out.end(), {2, 2, static_cast<std::uint8_t>(width >> 8),
                           static_cast<std::uint8_t>(width & 0xff)});
    for (int x = 0; x < width; ++x) {
      planes[0][x] = line[x].r;
      planes[1][x] = line[x].g;
      planes[2][x] = line[x].b;
      planes[3][x] = line[x].e;
    }
    for (const auto& plane : planes) append_rle_channel(out, plane);
  }
  return out;
}

HdrFile read_hdr_file(const std::filesystem::path& path) {
  return decode_hdr(read_file_bytes(path));
}

LinearImage read_hdr(const std::filesystem::path& path) { return read_hdr_file(path).image; }

void write_hdr(const LinearImage& image, const std::filesystem::path& path) {
  write_file_bytes(path, encode_hdr(image));
}

}  // namespace itm
