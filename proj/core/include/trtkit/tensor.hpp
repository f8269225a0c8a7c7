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

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace trtkit {

using Shape = std::vector<int64_t>;

int64_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles. Feature volumes use the channel-last
/// layout (H, W, T, C) with C fastest.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  int rank() const noexcept { return static_cast<int>(shape_.size()); }
  int64_t dim(int axis) const;
  int64_t size() const noexcept { return static_cast<int64_t>(data_.size()); }
  bool empty() const noexcept { return data_.empty(); }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }

  double& operator[](int64_t i) noexcept { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const noexcept { return data_[static_cast<size_t>(i)]; }

  /// Multi-index access; bounds are not checked.
  double& at(std::initializer_list<int64_t> index);
  double at(std::initializer_list<int64_t> index) const;

  Tensor reshaped(Shape shape) const;
  void fill(double v);

  Tensor& operator+=(const Tensor& other);
  Tensor& operator*=(double s);

  bool all_finite() const;
  double sum() const;
  double max_abs() const;

 private:
  int64_t offset(std::initializer_list<int64_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

bool same_shape(const Tensor& a, const Tensor& b);
void require_shape(const Tensor& t, const Shape& shape, const char* what);

}  // namespace trtkit
