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

#include "trtkit/fk.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "trtkit/error.hpp"

namespace trtkit {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int64_t signed_freq(int64_t k, int64_t n) { return k < n / 2 ? k : k - n; }
int64_t wrap_freq(int64_t f, int64_t n) { return f < 0 ? f + n : f; }

// Quarter-period phase shift on the depth axis. Without it the real part of the
// migrated pulse is odd about the reflector and its peak sits a few bins off.
std::complex<double> quadrature(int64_t k, int64_t n) {
  return k < n / 2 ? std::complex<double>(0.0, 1.0) : std::complex<double>(0.0, -1.0);
}

struct Buffer {
  explicit Buffer(size_t n) : data(fftw_alloc_complex(n)), size(n) {
    if (!data) throw std::bad_alloc();
  }
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  fftw_complex* data;
  size_t size;
  std::complex<double>* c() { return reinterpret_cast<std::complex<double>*>(data); }
};

}  // namespace

struct FkMigration::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  int64_t n0, n1, n2;

  Plans(int64_t a, int64_t b, int64_t c) : n0(a), n1(b), n2(c) {
    Buffer tmp(static_cast<size_t>(a * b * c));
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_3d(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c), tmp.data, tmp.data,
                               FFTW_FORWARD, flags);
    backward = fftw_plan_dft_3d(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c), tmp.data, tmp.data,
                                FFTW_BACKWARD, flags);
    if (!forward || !backward) throw NumericalError("FFTW planning failed");
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
};

FkMigration::FkMigration(int64_t size, int64_t bins, double wall_extent, double bin_width_ps)
    : size_(size), bins_(bins) {
  if (size < 2 || bins < 2) throw ConfigError("FK migration needs at least a 2x2x2 cube");
  if (!(wall_extent > 0.0) || !(bin_width_ps > 0.0)) throw ConfigError("FK migration geometry must be positive");
  const int64_t pn = 2 * size, pm = 2 * bins;
  plans_ = std::make_unique<Plans>(pn, pn, pm);

  radiometric_.resize(static_cast<size_t>(bins));
  for (int64_t t = 0; t < bins; ++t) {
    const double z = static_cast<double>(t) / static_cast<double>(bins);
    radiometric_[static_cast<size_t>(t)] = z * z;
  }

  // In index units the depth frequency maps to sqrt(iz^2 + a^2 (ix^2 + iy^2)).
  const double dz = meters_per_bin(bin_width_ps);
  const double dx = wall_extent / static_cast<double>(size);
  const double a = static_cast<double>(bins) * dz / (static_cast<double>(size) * dx);
  taps_.resize(static_cast<size_t>(pn * pn * pm));
  for (int64_t i = 0; i < pn; ++i) {
    const int64_t fi = signed_freq(i, pn);
    for (int64_t j = 0; j < pn; ++j) {
      const int64_t fj = signed_freq(j, pn);
      const double lateral = a * a * static_cast<double>(fi * fi + fj * fj);
      for (int64_t k = 0; k < pm; ++k) {
        Tap& tap = taps_[static_cast<size_t>((i * pn + j) * pm + k)];
        const int64_t fk = signed_freq(k, pm);
        if (fk == 0 || fk == -bins) continue;
        const double mag = std::sqrt(static_cast<double>(fk * fk) + lateral);
        if (mag > static_cast<double>(bins - 1)) continue;
        const double src = fk > 0 ? mag : -mag;
        const double jac = std::abs(static_cast<double>(fk)) / std::max(mag, 1e-6);
        const double lo = std::floor(src);
        const double frac = src - lo;
        tap.lo = wrap_freq(static_cast<int64_t>(lo), pm);
        tap.hi = wrap_freq(static_cast<int64_t>(lo) + 1, pm);
        tap.w_lo = jac * (1.0 - frac);
        tap.w_hi = jac * frac;
      }
    }
  }
}

FkMigration::~FkMigration() = default;

Tensor FkMigration::apply(const Tensor& cube) const {
  require_shape(cube, {size_, size_, bins_}, "fk_migration input");
  const int64_t pn = 2 * size_, pm = 2 * bins_;
  Buffer spec(static_cast<size_t>(pn * pn * pm));
  Buffer out(spec.size);
  std::fill(spec.c(), spec.c() + spec.size, std::complex<double>(0.0));
  for (int64_t i = 0; i < size_; ++i)
    for (int64_t j = 0; j < size_; ++j)
      for (int64_t t = 0; t < bins_; ++t)
        spec.c()[(i * pn + j) * pm + t] = cube[(i * size_ + j) * bins_ + t] * radiometric_[static_cast<size_t>(t)];
  fftw_execute_dft(plans_->forward, spec.data, spec.data);
  for (int64_t r = 0; r < pn * pn; ++r) {
    const std::complex<double>* src = spec.c() + r * pm;
    std::complex<double>* dst = out.c() + r * pm;
    const Tap* taps = taps_.data() + r * pm;
    for (int64_t k = 0; k < pm; ++k) {
      const Tap& tp = taps[k];
      dst[k] = tp.lo < 0 ? std::complex<double>(0.0) : quadrature(k, pm) * (tp.w_lo * src[tp.lo] + tp.w_hi * src[tp.hi]);
    }
  }
  fftw_execute_dft(plans_->backward, out.data, out.data);
  const double norm = 1.0 / static_cast<double>(pn * pn * pm);
  Tensor vol({size_, size_, bins_});
  for (int64_t i = 0; i < size_; ++i)
    for (int64_t j = 0; j < size_; ++j)
      for (int64_t t = 0; t < bins_; ++t) vol[(i * size_ + j) * bins_ + t] = out.c()[(i * pn + j) * pm + t].real() * norm;
  return vol;
}

Tensor FkMigration::adjoint(const Tensor& volume) const {
  require_shape(volume, {size_, size_, bins_}, "fk_migration adjoint input");
  const int64_t pn = 2 * size_, pm = 2 * bins_;
  Buffer g(static_cast<size_t>(pn * pn * pm));
  Buffer acc(g.size);
  std::fill(g.c(), g.c() + g.size, std::complex<double>(0.0));
  std::fill(acc.c(), acc.c() + acc.size, std::complex<double>(0.0));
  const double norm = 1.0 / static_cast<double>(pn * pn * pm);
  for (int64_t i = 0; i < size_; ++i)
    for (int64_t j = 0; j < size_; ++j)
      for (int64_t t = 0; t < bins_; ++t) g.c()[(i * pn + j) * pm + t] = volume[(i * size_ + j) * bins_ + t] * norm;
  // Adjoint of the unnormalised inverse transform is the forward transform.
  fftw_execute_dft(plans_->forward, g.data, g.data);
  for (int64_t r = 0; r < pn * pn; ++r) {
    const std::complex<double>* src = g.c() + r * pm;
    std::complex<double>* dst = acc.c() + r * pm;
    const Tap* taps = taps_.data() + r * pm;
    for (int64_t k = 0; k < pm; ++k) {
      const Tap& tp = taps[k];
      if (tp.lo < 0) continue;
      const std::complex<double> v = std::conj(quadrature(k, pm)) * src[k];
      dst[tp.lo] += tp.w_lo * v;
      dst[tp.hi] += tp.w_hi * v;
    }
  }
  fftw_execute_dft(plans_->backward, acc.data, acc.data);
  Tensor cube({size_, size_, bins_});
  for (int64_t i = 0; i < size_; ++i)
    for (int64_t j = 0; j < size_; ++j)
      for (int64_t t = 0; t < bins_; ++t)
        cube[(i * size_ + j) * bins_ + t] = acc.c()[(i * pn + j) * pm + t].real() * radiometric_[static_cast<size_t>(t)];
  return cube;
}

Tensor fk_migrate(const TransientCube& cube, double wall_extent) {
  if (cube.height() != cube.width()) throw ShapeError("FK migration requires a square scan grid");
  FkMigration fk(cube.height(), cube.bins(), wall_extent, cube.bin_width_ps());
  return fk.apply(cube.to_tensor());
}

Var fk_migration(const Var& x, const std::shared_ptr<const FkMigration>& fk) {
  const Shape& s = x.shape();
  if (s.size() != 4 || s[0] != fk->size() || s[1] != fk->size() || s[2] != fk->bins()) {
    throw ShapeError("fk_migration: input " + shape_string(s) + " does not match the migration grid");
  }
  const int64_t c = s[3], n = s[0] * s[1] * s[2];
  auto channel = [n, c](const Tensor& src, int64_t ch) {
    Tensor t({src.dim(0), src.dim(1), src.dim(2)});
    for (int64_t i = 0; i < n; ++i) t[i] = src[i * c + ch];
    return t;
  };
  Tensor y(s);
  for (int64_t ch = 0; ch < c; ++ch) {
    const Tensor v = fk->apply(channel(x.value(), ch));
    for (int64_t i = 0; i < n; ++i) y[i * c + ch] = v[i];
  }
  return make_op(std::move(y), {x}, [fk, channel, n, c](detail::Node& self) {
    auto& in = self.input(0);
    if (!in.requires_grad) return;
    Tensor& g = in.grad_buffer();
    for (int64_t ch = 0; ch < c; ++ch) {
      const Tensor a = fk->adjoint(channel(self.grad, ch));
      for (int64_t i = 0; i < n; ++i) g[i * c + ch] += a[i];
    }
  });
}

}  // namespace trtkit
