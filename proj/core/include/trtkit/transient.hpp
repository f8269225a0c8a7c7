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
#include <filesystem>
#include <span>
#include <vector>

#include "trtkit/tensor.hpp"

namespace trtkit {

/// Speed of light in m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

/// One-way distance covered by a round trip of `bin_width_ps` picoseconds.
inline double meters_per_bin(double bin_width_ps) { return bin_width_ps * 1e-12 * kSpeedOfLight / 2.0; }

enum class CubeKind : uint8_t { counts = 0, rates = 1 };

/// H x W x T photon histogram volume, T fastest in memory.
class TransientCube {
 public:
  TransientCube() = default;
  TransientCube(int64_t height, int64_t width, int64_t bins, double bin_width_ps, CubeKind kind);
  TransientCube(const Tensor& values, double bin_width_ps, CubeKind kind);

  int64_t height() const noexcept { return height_; }
  int64_t width() const noexcept { return width_; }
  int64_t bins() const noexcept { return bins_; }
  double bin_width_ps() const noexcept { return bin_width_ps_; }
  CubeKind kind() const noexcept { return kind_; }
  int64_t pixels() const noexcept { return height_ * width_; }

  double& at(int64_t h, int64_t w, int64_t n) { return values_[static_cast<size_t>((h * width_ + w) * bins_ + n)]; }
  double at(int64_t h, int64_t w, int64_t n) const {
    return values_[static_cast<size_t>((h * width_ + w) * bins_ + n)];
  }
  std::span<double> histogram(int64_t h, int64_t w) {
    return {values_.data() + (h * width_ + w) * bins_, static_cast<size_t>(bins_)};
  }
  std::span<const double> histogram(int64_t h, int64_t w) const {
    return {values_.data() + (h * width_ + w) * bins_, static_cast<size_t>(bins_)};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// (H, W, T) tensor copy.
  Tensor to_tensor() const;

  /// Throws if an invariant is violated: nonnegative values, integral
  /// counts, positive bin width, nonempty dimensions.
  void validate() const;

  bool operator==(const TransientCube& other) const = default;

 private:
  int64_t height_ = 0, width_ = 0, bins_ = 0;
  double bin_width_ps_ = 0.0;
  CubeKind kind_ = CubeKind::counts;
  std::vector<double> values_;
};

/// Writes the little-endian "TRTC" container. Counts are stored as u32,
/// rates as f32.
void save_cube(const TransientCube& cube, const std::filesystem::path& path);
TransientCube load_cube(const std::filesystem::path& path);

enum class DepthUnits { meters, bins };

const char* units_name(DepthUnits u);
DepthUnits parse_units(const std::string& s);

struct DepthMap {
  int64_t height = 0, width = 0;
  DepthUnits units = DepthUnits::meters;
  std::vector<double> values;
  std::vector<uint8_t> valid;

  DepthMap() = default;
  DepthMap(int64_t h, int64_t w, DepthUnits u = DepthUnits::meters);

  double& at(int64_t h, int64_t w) { return values[static_cast<size_t>(h * width + w)]; }
  double at(int64_t h, int64_t w) const { return values[static_cast<size_t>(h * width + w)]; }
  bool is_valid(int64_t h, int64_t w) const { return valid[static_cast<size_t>(h * width + w)] != 0; }
  int64_t valid_count() const;
  Tensor to_tensor() const;
  Tensor mask_tensor() const;
  void validate() const;
};

struct IntensityImage {
  int64_t height = 0, width = 0;
  std::vector<double> values;

  IntensityImage() = default;
  IntensityImage(int64_t h, int64_t w, double fill = 0.0);

  double& at(int64_t h, int64_t w) { return values[static_cast<size_t>(h * width + w)]; }
  double at(int64_t h, int64_t w) const { return values[static_cast<size_t>(h * width + w)]; }
  double max() const;
  Tensor to_tensor() const;
  void validate() const;
};

/// Depth in metres from the index of the highest bin (lowest index on ties).
/// All-zero histograms are marked invalid.
DepthMap depth_from_argmax(const TransientCube& cube);

/// Converts between bin-index and metric depth for a given bin width.
DepthMap depth_to_meters(const DepthMap& bins, double bin_width_ps);
DepthMap depth_to_bins(const DepthMap& meters, double bin_width_ps);

}  // namespace trtkit
