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

#ifndef ITM_IMAGE_IO_H
#define ITM_IMAGE_IO_H

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "itm/image.h"

namespace itm {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

////////////////////////////////////////////////////////////////////////////////
// RGBE shared-exponent pixels

struct RgbePixel {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t e = 0;  // biased by 128; 0 is canonical black

  bool operator==(const RgbePixel&) const = default;
};

// Smallest exponent that holds the largest component, mantissas rounded to
// nearest. Values too small for exponent 1 keep exponent 1 with small
// mantissas; anything that rounds to all-zero becomes canonical black.
// Throws FormatError for non-finite, negative or overflowing components.
RgbePixel rgbe_encode(const Rgb& rgb);

// mantissa / 256 * 2^(e - 128); e == 0 decodes to black.
Rgb rgbe_decode(const RgbePixel& p);

////////////////////////////////////////////////////////////////////////////////
// Radiance .hdr

struct HdrFile {
  LinearImage image;
  // Header lines other than the magic, FORMAT and the terminating blank line,
  // verbatim and in file order (EXPOSURE=, PRIMARIES=, comments, ...).
  std::vector<std::string> attributes;
};

HdrFile decode_hdr(std::span<const std::uint8_t> bytes);
Bytes encode_hdr(const LinearImage& image, std::span<const std::string> attributes = {});

LinearImage read_hdr(const std::filesystem::path& path);
HdrFile read_hdr_file(const std::filesystem::path& path);
void write_hdr(const LinearImage& image, const std::filesystem::path& path);

////////////////////////////////////////////////////////////////////////////////
// Portable FloatMap

enum class Endian { kLittle, kBig };

LinearImage decode_pfm(std::span<const std::uint8_t> bytes);
Bytes encode_pfm(const LinearImage& image, Endian endian = Endian::kLittle);

LinearImage read_pfm(const std::filesystem::path& path);
void write_pfm(const LinearImage& image, const std::filesystem::path& path);

// Dispatch on extension: .hdr / .pic -> Radiance, .pfm -> PFM.
LinearImage read_linear(const std::filesystem::path& path);
void write_linear(const LinearImage& image, const std::filesystem::path& path);
bool is_linear_image_path(const std::filesystem::path& path);

////////////////////////////////////////////////////////////////////////////////
// 8-bit rasters
//
// PPM (P6) and PNG are built in and lossless. Other containers, JPEG in
// particular, are plugged in as codecs; the module only defines the decoded
// raster contract.

class Ldr8Codec {
 public:
  virtual ~Ldr8Codec() = default;

  virtual std::string_view name() const = 0;
  // Lower-case extensions including the dot, e.g. ".jpg".
  virtual std::vector<std::string> extensions() const = 0;
  virtual bool sniff(std::span<const std::uint8_t> bytes) const = 0;
  virtual Ldr8Image decode(std::span<const std::uint8_t> bytes) const = 0;
  // quality is in [1, 100] and ignored by lossless codecs.
  virtual Bytes encode(const Ldr8Image& image, int quality) const = 0;
};

std::unique_ptr<Ldr8Codec> make_ppm_codec();
std::unique_ptr<Ldr8Codec> make_png_codec();
// libjpeg-backed adapter; nullptr when the toolkit was built without libjpeg.
std::unique_ptr<Ldr8Codec> make_jpeg_codec();

class Ldr8CodecRegistry {
 public:
  Ldr8CodecRegistry() = default;

  // PPM, PNG and (when available) JPEG.
  static Ldr8CodecRegistry with_builtin_codecs();

  void add(std::unique_ptr<Ldr8Codec> codec);

  const Ldr8Codec* for_bytes(std::span<const std::uint8_t> bytes) const;
  const Ldr8Codec* for_extension(std::string_view extension) const;

 private:
  std::vector<std::shared_ptr<const Ldr8Codec>> codecs_;
};

// Shared immutable registry holding the built-in codecs.
const Ldr8CodecRegistry& default_ldr8_codecs();

Ldr8Image decode_ldr8(std::span<const std::uint8_t> bytes,
                      const Ldr8CodecRegistry& codecs = default_ldr8_codecs());
Ldr8Image read_ldr8(const std::filesystem::path& path,
                    const Ldr8CodecRegistry& codecs = default_ldr8_codecs());
void write_ldr8(const Ldr8Image& image, const std::filesystem::path& path, int quality = 90,
                const Ldr8CodecRegistry& codecs = default_ldr8_codecs());

}  // namespace itm

#endif  // ITM_IMAGE_IO_H
