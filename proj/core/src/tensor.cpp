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

#include "trtkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trtkit/error.hpp"

namespace trtkit {

int64_t numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw ShapeError("negative dimension in shape " + shape_string(shape));
    n *= d;
  }
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(static_cast<size_t>(numel(shape_)), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (static_cast<int64_t>(data_.size()) != numel(shape_)) {
    throw ShapeError("value count " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

int64_t Tensor::dim(int axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank()) throw ShapeError("axis out of range");
  return shape_[static_cast<size_t>(axis)];
}

int64_t Tensor::offset(std::initializer_list<int64_t> index) const {
  int64_t off = 0;
  size_t k = 0;
  for (int64_t i : index) off = off * shape_[k++] + i;
  return off;
}

double& Tensor::at(std::initializer_list<int64_t> index) { return data_[static_cast<size_t>(offset(index))]; }
double Tensor::at(std::initializer_list<int64_t> index) const {
  return data_[static_cast<size_t>(offset(index))];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (numel(shape) != size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.size() != size()) throw ShapeError("tensor += size mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

void require_shape(const Tensor& t, const Shape& shape, const char* what) {
  if (t.shape() != shape) {
    throw ShapeError(std::string(what) + ": expected " + shape_string(shape) + ", got " +
                     shape_string(t.shape()));
  }
}

}  // namespace trtkit
