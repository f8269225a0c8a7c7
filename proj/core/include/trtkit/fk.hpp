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
#include <memory>
#include <vector>

#include "trtkit/autograd.hpp"
#include "trtkit/transient.hpp"

namespace trtkit {

/// Frequency-wavenumber (Stolt) migration of confocal transients.
///
/// The cube is weighted by z^2, zero-padded to twice its size, transformed
/// with a 3-D FFT, resampled along the depth frequency onto
/// sqrt(kz^2 + kx^2 + ky^2) with linear interpolation and the |kz| / k
/// Jacobian, and transformed back. The resampling is odd in kz so real input
/// stays real, which makes the whole map linear. Depth bin k of the output
/// is at k * c * dt / 2.
class FkMigration {
 public:
  /// `size` is the side of the square scan grid.
  FkMigration(int64_t size, int64_t bins, double wall_extent, double bin_width_ps);
  ~FkMigration();
  FkMigration(const FkMigration&) = delete;
  FkMigration& operator=(const FkMigration&) = delete;

  int64_t size() const noexcept { return size_; }
  int64_t bins() const noexcept { return bins_; }

  /// (N, N, T) cube -> (N, N, T) volume.
  Tensor apply(const Tensor& cube) const;
  /// Exact adjoint of `apply`.
  Tensor adjoint(const Tensor& volume) const;

 private:
  struct Tap {
    int64_t lo = -1;  // source index along the padded depth axis, -1 when out of band
    int64_t hi = -1;
    double w_lo = 0.0, w_hi = 0.0;
  };
  struct Plans;

  int64_t size_, bins_;
  std::vector<double> radiometric_;
  std::vector<Tap> taps_;  // per padded frequency (kx, ky, kz)
  std::unique_ptr<Plans> plans_;
};

/// Migrates a single cube; `wall_extent` is the scanned square side in metres.
Tensor fk_migrate(const TransientCube& cube, double wall_extent);

/// Channelwise migration of an (N, N, T, C) feature volume, differentiable
/// through the adjoint.
Var fk_migration(const Var& x, const std::shared_ptr<const FkMigration>& fk);

}  // namespace trtkit
