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

#ifndef ITM_ERROR_H
#define ITM_ERROR_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace itm {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the domain of a function (negative radiance, NaN, x > 1...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Image dimensions that do not agree, or are too small for a stencil.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid construction parameters (non-monotone CRF table, bad schedule...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Exposure range cannot be derived (e.g. an all-black image).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown during simulation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Unsupported container or unencodable value.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Malformed byte stream. Carries the byte offset where parsing stopped.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : FormatError(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Bad configuration file or command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace itm

#endif  // ITM_ERROR_H
