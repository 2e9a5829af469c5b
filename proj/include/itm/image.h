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

#ifndef ITM_IMAGE_H
#define ITM_IMAGE_H

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace itm {

using Rgb = std::array<double, 3>;

struct Shape {
  int width = 0;
  int height = 0;

  std::size_t pixels() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const Shape&) const = default;
};

// Throws ShapeError unless both shapes agree.
void require_same_shape(Shape a, Shape b, const char* what);

////////////////////////////////////////////////////////////////////////////////
// LinearImage
//
// Row-major RGB raster of relative linear radiance. Every component is finite
// and non-negative; constructors and mutators validate this.

class LinearImage {
 public:
  LinearImage(int width, int height);  // zero-filled
  LinearImage(int width, int height, std::vector<float> data);

  static LinearImage filled(int width, int height, Rgb value);

  int width() const { return shape_.width; }
  int height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  std::size_t pixel_count() const { return shape_.pixels(); }

  std::span<const float> data() const { return data_; }

  Rgb at(int x, int y) const;
  Rgb pixel(std::size_t index) const;
  void set(int x, int y, Rgb value);
  void set_pixel(std::size_t index, Rgb value);

  bool operator==(const LinearImage&) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

////////////////////////////////////////////////////////////////////////////////
// Ldr8Image: row-major 8-bit RGB, CRF-encoded.

class Ldr8Image {
 public:
  Ldr8Image(int width, int height);
  Ldr8Image(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return shape_.width; }
  int height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  std::size_t pixel_count() const { return shape_.pixels(); }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  std::array<std::uint8_t, 3> at(int x, int y) const;
  void set(int x, int y, std::array<std::uint8_t, 3> value);

  bool operator==(const Ldr8Image&) const = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> data_;
};

////////////////////////////////////////////////////////////////////////////////
// ScalarField: one real value per pixel (luminance, masks, error maps...).

class ScalarField {
 public:
  ScalarField(int width, int height, double fill = 0.0);
  ScalarField(int width, int height, std::vector<double> values);

  int width() const { return shape_.width; }
  int height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  double at(int x, int y) const { return values_[index(x, y)]; }
  double& at(int x, int y) { return values_[index(x, y)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const ScalarField&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
           static_cast<std::size_t>(x);
  }

  Shape shape_;
  std::vector<double> values_;
};

////////////////////////////////////////////////////////////////////////////////
// RgbField: unconstrained real RGB triples. Used for intermediates that may
// leave the LinearImage domain (pre-clip noisy exposures, residual fields).

class RgbField {
 public:
  RgbField(int width, int height, double fill = 0.0);
  RgbField(int width, int height, std::vector<double> values);
  explicit RgbField(const LinearImage& image);

  int width() const { return shape_.width; }
  int height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  std::size_t pixel_count() const { return shape_.pixels(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool operator==(const RgbField&) const = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

}  // namespace itm

#endif  // ITM_IMAGE_H
