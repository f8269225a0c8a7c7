// Copyright (c) 2026 The trtkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace trtkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files: bad magic, version mismatch, truncated payloads.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Incompatible tensor/image shapes or indivisible dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Scene geometry that does not fit the temporal range of a histogram.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values encountered during computation or training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File-system failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trtkit
