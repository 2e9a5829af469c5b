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

#include "itm/image.h"

#include <cmath>
#include <string>
#include <utility>

#include "itm/error.h"

namespace itm {

namespace {

void require_positive(int width, int height, const char* what) {
  if (width <= 0 || height <= 0) {
    throw ShapeError(std::string(what) + ": dimensions must be positive, got " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
}

void require_length(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(expected) +
                     " values, got " + std::to_string(actual));
  }
}

void require_radiance(double v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError("LinearImage components must be finite and non-negative, got " +
                      std::to_string(v));
  }
}

}  // namespace

void require_same_shape(Shape a, Shape b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch " + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height));
  }
}

////////////////////////////////////////////////////////////////////////////////
// LinearImage

LinearImage::LinearImage(int width, int height) : shape_{width, height} {
  require_positive(width, height, "LinearImage");
  data_.assign(shape_.pixels() * 3, 0.0f);
}

LinearImage::LinearImage(int width, int height, std::vector<float> data)
    : shape_{width, height}, data_(std::move(data)) {
  require_positive(width, height, "LinearImage");
  require_length(data_.size(), shape_.pixels() * 3, "LinearImage");
  for (float v : data_) require_radiance(v);
}

LinearImage LinearImage::filled(int width, int height, Rgb value) {
  LinearImage image(width, height);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) image.set_pixel(i, value);
  return image;
}

Rgb LinearImage::at(int x, int y) const {
  return pixel(static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
               static_cast<std::size_t>(x));
}

Rgb LinearImage::pixel(std::size_t index) const {
  const float* p = &data_[index * 3];
  return {p[0], p[1], p[2]};
}

void LinearImage::set(int x, int y, Rgb value) {
  set_pixel(static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
                static_cast<std::size_t>(x),
            value);
}

void LinearImage::set_pixel(std::size_t index, Rgb value) {
  for (int c = 0; c < 3; ++c) {
    const float v = static_cast<float>(value[c]);
    require_radiance(v);
    data_[index * 3 + c] = v;
  }
}

////////////////////////////////////////////////////////////////////////////////
// Ldr8Image

Ldr8Image::Ldr8Image(int width, int height) : shape_{width, height} {
  require_positive(width, height, "Ldr8Image");
  data_.assign(shape_.pixels() * 3, 0);
}

Ldr8Image::Ldr8Image(int width, int height, std::vector<std::uint8_t> data)
    : shape_{width, height}, data_(std::move(data)) {
  require_positive(width, height, "Ldr8Image");
  require_length(data_.size(), shape_.pixels() * 3, "Ldr8Image");
}

std::array<std::uint8_t, 3> Ldr8Image::at(int x, int y) const {
  const std::size_t i =
      (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void Ldr8Image::set(int x, int y, std::array<std::uint8_t, 3> value) {
  const std::size_t i =
      (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) + x) * 3;
  data_[i] = value[0];
  data_[i + 1] = value[1];
  data_[i + 2] = value[2];
}

////////////////////////////////////////////////////////////////////////////////
// ScalarField / RgbField

ScalarField::ScalarField(int width, int height, double fill) : shape_{width, height} {
  require_positive(width, height, "ScalarField");
  values_.assign(shape_.pixels(), fill);
}

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : shape_{width, height}, values_(std::move(values)) {
  require_positive(width, height, "ScalarField");
  require_length(values_.size(), shape_.pixels(), "ScalarField");
}

RgbField::RgbField(int width, int height, double fill) : shape_{width, height} {
  require_positive(width, height, "RgbField");
  values_.assign(shape_.pixels() * 3, fill);
}

RgbField::RgbField(int width, int height, std::vector<double> values)
    : shape_{width, height}, values_(std::move(values)) {
  require_positive(width, height, "RgbField");
  require_length(values_.size(), shape_.pixels() * 3, "RgbField");
}

RgbField::RgbField(const LinearImage& image) : shape_(image.shape()) {
  values_.assign(image.data().begin(), image.data().end());
}

}  // namespace itm
