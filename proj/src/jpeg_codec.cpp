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

#include "itm/image_io.h"

#ifdef ITM_HAVE_JPEG

#include <csetjmp>
#include <cstdlib>
#include <cstdio>
#include <string>

#include <jpeglib.h>

#include "itm/error.h"

namespace itm {

namespace {

struct ErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_error(j_common_ptr info) {
  auto* err = reinterpret_cast<ErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

void on_message(j_common_ptr) {}

// Adapter around the system libjpeg. All libjpeg state lives in the calling
// frame, and no C++ object with a destructor is alive across setjmp.
class JpegCodec final : public Ldr8Codec {
 public:
  std::string_view name() const override { return "jpeg"; }
  std::vector<std::string> extensions() const override { return {".jpg", ".jpeg"}; }

  bool sniff(std::span<const std::uint8_t> bytes) const override {
    return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
  }

  Ldr8Image decode(std::span<const std::uint8_t> bytes) const override {
    std::vector<std::uint8_t> pixels;
    int width = 0;
    int height = 0;
    std::string failure;
    if (!decode_into(bytes, pixels, width, height, failure)) throw ParseError("JPEG: " + failure, 0);
    return Ldr8Image(width, height, std::move(pixels));
  }

  Bytes encode(const Ldr8Image& image, int quality) const override {
    Bytes out;
    std::string failure;
    if (!encode_into(image, quality, out, failure)) throw FormatError("JPEG: " + failure);
    return out;
  }

 private:
  static bool decode_into(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& pixels,
                          int& width, int& height, std::string& failure) {
    jpeg_decompress_struct info;
    ErrorManager err;
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = on_error;
    err.base.output_message = on_message;
    if (setjmp(err.jump)) {
      failure = err.message;
      jpeg_destroy_decompress(&info);
      return false;
    }
    jpeg_create_decompress(&info);
    jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&info, TRUE);
    info.out_color_space = JCS_RGB;
    jpeg_start_decompress(&info);
    if (info.output_components != 3 || info.output_width == 0 || info.output_height == 0) {
      jpeg_destroy_decompress(&info);
      failure = "unsupported component layout";
      return false;
    }
    width = static_cast<int>(info.output_width);
    height = static_cast<int>(info.output_height);
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    while (info.output_scanline < info.output_height) {
      JSAMPROW row = pixels.data() + static_cast<std::size_t>(info.output_scanline) * width * 3;
      jpeg_read_scanlines(&info, &row, 1);
    }
    jpeg_finish_decompress(&info);
    jpeg_destroy_decompress(&info);
    return true;
  }

  static bool encode_into(const Ldr8Image& image, int quality, Bytes& out, std::string& failure) {
    jpeg_compress_struct info;
    ErrorManager err;
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    info.err = jpeg_std_error(&err.base);
    err.base.error_exit = on_error;
    err.base.output_message = on_message;
    if (setjmp(err.jump)) {
      failure = err.message;
      jpeg_destroy_compress(&info);
      std::free(buffer);
      return false;
    }
    jpeg_create_compress(&info);
    jpeg_mem_dest(&info, &buffer, &size);
    info.image_width = static_cast<JDIMENSION>(image.width());
    info.image_height = static_cast<JDIMENSION>(image.height());
    info.input_components = 3;
    info.in_color_space = JCS_RGB;
    jpeg_set_defaults(&info);
    jpeg_set_quality(&info, quality < 1 ? 1 : quality > 100 ? 100 : quality, TRUE);
    jpeg_start_compress(&info, TRUE);
    const std::uint8_t* data = image.data().data();
    while (info.next_scanline < info.image_height) {
      JSAMPROW row = const_cast<std::uint8_t*>(data) +
                     static_cast<std::size_t>(info.next_scanline) * image.width() * 3;
      jpeg_write_scanlines(&info, &row, 1);
    }
    jpeg_finish_compress(&info);
    jpeg_destroy_compress(&info);
    out.assign(buffer, buffer + size);
    std::free(buffer);
    return true;
  }
};

}  // namespace

std::unique_ptr<Ldr8Codec> make_jpeg_codec() { return std::make_unique<JpegCodec>(); }

}  // namespace itm

#else

namespace itm {

std::unique_ptr<Ldr8Codec> make_jpeg_codec() { return nullptr; }

}  // namespace itm

#endif  // ITM_HAVE_JPEG
