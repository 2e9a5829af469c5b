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
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <png.h>

#include "itm/error.h"
#include "itm/image_io.h"

namespace itm {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

////////////////////////////////////////////////////////////////////////////////
// PPM (binary P6, maxval 255)

class PpmCodec final : public Ldr8Codec {
 public:
  std::string_view name() const override { return "ppm"; }
  std::vector<std::string> extensions() const override { return {".ppm"}; }

  bool sniff(std::span<const std::uint8_t> bytes) const override {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
  }

  Ldr8Image decode(std::span<const std::uint8_t> bytes) const override {
    std::size_t pos = 0;
    auto token = [&]() {
      while (true) {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
          while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
          continue;
        }
        break;
      }
      const std::size_t start = pos;
      while (pos < bytes.size() && !std::isspace(bytes[pos]) && pos - start < 16) ++pos;
      if (pos == start) throw ParseError("truncated PPM header", pos);
      return std::string(bytes.begin() + start, bytes.begin() + pos);
    };
    auto number = [&](const char* what) {
      const std::size_t at = pos;
      const std::string t = token();
      if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError(std::string("invalid PPM ") + what + " '" + t + "'", at);
      }
      const long v = std::stol(t);
      if (v <= 0 || v > (1 << 20)) throw ParseError(std::string("invalid PPM ") + what, at);
      return v;
    };
    if (token() != "P6") throw ParseError("bad PPM magic", 0);
    const long width = number("width");
    const long height = number("height");
    const std::size_t maxval_at = pos;
    if (number("maxval") != 255) throw ParseError("only 8-bit PPM (maxval 255) is supported", maxval_at);
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw ParseError("truncated PPM header", pos);
    ++pos;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    if (bytes.size() - pos < count) throw ParseError("PPM raster truncated", bytes.size());
    return Ldr8Image(static_cast<int>(width), static_cast<int>(height),
                     std::vector<std::uint8_t>(bytes.begin() + pos, bytes.begin() + pos + count));
  }

  Bytes encode(const Ldr8Image& image, int) const override {
    const std::string header =
        "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    Bytes out(header.begin(), header.end());
    out.insert(out.end(), image.data().begin(), image.data().end());
    return out;
  }
};

////////////////////////////////////////////////////////////////////////////////
// PNG via the libpng simplified API

class PngCodec final : public Ldr8Codec {
 public:
  std::string_view name() const override { return "png"; }
  std::vector<std::string> extensions() const override { return {".png"}; }

  bool sniff(std::span<const std::uint8_t> bytes) const override {
    static constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8, kSignature);
  }

  Ldr8Image decode(std::span<const std::uint8_t> bytes) const override {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
      const std::string message = png.message;
      png_image_free(&png);
      throw ParseError("PNG: " + message, 0);
    }
    png.format = PNG_FORMAT_RGB;
    if (png.width == 0 || png.height == 0 || png.width > (1u << 20) || png.height > (1u << 20)) {
      png_image_free(&png);
      throw ParseError("PNG: invalid dimensions", 0);
    }
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, data.data(), 0, nullptr)) {
      const std::string message = png.message;
      png_image_free(&png);
      throw ParseError("PNG: " + message, 0);
    }
    return Ldr8Image(static_cast<int>(png.width), static_cast<int>(png.height), std::move(data));
  }

  Bytes encode(const Ldr8Image& image, int) const override {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.data().data(), 0, nullptr)) {
      throw FormatError(std::string("PNG: ") + png.message);
    }
    Bytes out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, image.data().data(), 0, nullptr)) {
      throw FormatError(std::string("PNG: ") + png.message);
    }
    out.resize(size);
    return out;
  }
};

}  // namespace

Bytes read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError("error reading '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("error writing '" + path.string() + "'");
}

bool is_linear_image_path(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".hdr" || ext == ".pic" || ext == ".pfm";
}

LinearImage read_linear(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".hdr" || ext == ".pic") return read_hdr(path);
  if (ext == ".pfm") return read_pfm(path);
  throw FormatError("unsupported HDR container '" + ext + "'");
}

void write_linear(const LinearImage& image, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".hdr" || ext == ".pic") return write_hdr(image, path);
  if (ext == ".pfm") return write_pfm(image, path);
  throw FormatError("unsupported HDR container '" + ext + "'");
}

std::unique_ptr<Ldr8Codec> make_ppm_codec() { return std::make_unique<PpmCodec>(); }
std::unique_ptr<Ldr8Codec> make_png_codec() { return std::make_unique<PngCodec>(); }

Ldr8CodecRegistry Ldr8CodecRegistry::with_builtin_codecs() {
  Ldr8CodecRegistry registry;
  registry.add(make_ppm_codec());
  registry.add(make_png_codec());
  if (auto jpeg = make_jpeg_codec()) registry.add(std::move(jpeg));
  return registry;
}

void Ldr8CodecRegistry::add(std::unique_ptr<Ldr8Codec> codec) {
  codecs_.push_back(std::shared_ptr<const Ldr8Codec>(std::move(codec)));
}

const Ldr8Codec* Ldr8CodecRegistry::for_bytes(std::span<const std::uint8_t> bytes) const {
  for (const auto& codec : codecs_) {
    if (codec->sniff(bytes)) return codec.get();
  }
  return nullptr;
}

const Ldr8Codec* Ldr8CodecRegistry::for_extension(std::string_view extension) const {
  std::string lower(extension);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& codec : codecs_) {
    for (const std::string& ext : codec->extensions()) {
      if (ext == lower) return codec.get();
    }
  }
  return nullptr;
}

const Ldr8CodecRegistry& default_ldr8_codecs() {
  static const Ldr8CodecRegistry registry = Ldr8CodecRegistry::with_builtin_codecs();
  return registry;
}

Ldr8Image decode_ldr8(std::span<const std::uint8_t> bytes, const Ldr8CodecRegistry& codecs) {
  const Ldr8Codec* codec = codecs.for_bytes(bytes);
  if (codec == nullptr) throw FormatError("unsupported 8-bit image container");
  return codec->decode(bytes);
}

Ldr8Image read_ldr8(const std::filesystem::path& path, const Ldr8CodecRegistry& codecs) {
  return decode_ldr8(read_file_bytes(path), codecs);
}

void write_ldr8(const Ldr8Image& image, const std::filesystem::path& path, int quality,
                const Ldr8CodecRegistry& codecs) {
  const Ldr8Codec* codec = codecs.for_extension(lower_extension(path));
  if (codec == nullptr) {
    throw FormatError("no 8-bit codec for extension '" + path.extension().string() + "'");
  }
  write_file_bytes(path, codec->encode(image, quality));
}

}  // namespace itm
