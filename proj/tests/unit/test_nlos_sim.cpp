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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "trtkit/dataset.hpp"
#include "trtkit/error.hpp"
#include "trtkit/fk.hpp"
#include "trtkit/los_sim.hpp"
#include "trtkit/nlos_sim.hpp"

using namespace trtkit;
namespace fs = std::filesystem;

namespace {

ScenePoint point(double x, double y, double z, double albedo = 1.0) {
  ScenePoint p;
  p.position = {x, y, z};
  p.albedo = albedo;
  return p;
}

HiddenScene random_scene(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-0.45, 0.45), z(0.3, 0.8), a(0.1, 1.0), tilt(-0.3, 0.3);
  HiddenScene s;
  for (int i = 0; i < n; ++i) {
    ScenePoint p = point(xy(rng), xy(rng), z(rng), a(rng));
    const double nx = tilt(rng), ny = tilt(rng);
    const double len = std::sqrt(nx * nx + ny * ny + 1.0);
    p.normal = {nx / len, ny / len, -1.0 / len};
    s.points.push_back(p);
  }
  return s;
}

std::array<int64_t, 3> argmax3(const Tensor& v) {
  int64_t best = 0;
  for (int64_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  const int64_t T = v.dim(2), W = v.dim(1);
  return {best / (W * T), (best / T) % W, best % T};
}

}  // namespace

TEST(Confocal, PointOnAxisPeakAndFalloff) {
  ScanGrid g{9, 9, 0.9, 128, 132.0};
  HiddenScene s;
  s.points.push_back(point(g.wall_x(4), g.wall_y(4), 1.0));
  const TransientCube cube = render_confocal(s, g, PulseModel::from_kernels({1.0}));
  const int64_t peak = std::llround(1.0 / meters_per_bin(132.0));
  EXPECT_NEAR(cube.at(4, 4, peak), 1.0, 1e-12);
  // Neighbour wall pixels: albedo * cos / r^2 with cos = 1 / r at unit depth.
  const double dx = g.wall_x(5) - g.wall_x(4);
  const double r = std::sqrt(1.0 + dx * dx);
  const auto h = cube.histogram(4, 5);
  EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), (1.0 / r) / (r * r), 1e-12);
}

TEST(Confocal, ZeroAlbedoSceneIsZero) {
  HiddenScene s;
  s.points.push_back(point(0.0, 0.0, 0.5, 0.0));
  const TransientCube cube = render_confocal(s, ScanGrid{8, 8, 1.0, 128, 132.0}, PulseModel::gaussian(300, 132));
  for (double v : cube.values()) EXPECT_EQ(v, 0.0);
}

TEST(Confocal, MatchesBruteForceOracle) {
  const ScanGrid g{8, 8, 1.0, 128, 132.0};
  const HiddenScene s = random_scene(5, 1);
  const PulseModel pulse = PulseModel::gaussian(300.0, 132.0);
  const TransientCube got = render_confocal(s, g, pulse);
  const TransientCube want = oracle::confocal(s, g, pulse.kernel);
  for (size_t i = 0; i < got.values().size(); ++i) EXPECT_NEAR(got.values()[i], want.values()[i], 1e-12);
}

TEST(Confocal, MirrorSymmetry) {
  const ScanGrid g{8, 8, 1.0, 128, 132.0};
  HiddenScene s = random_scene(6, 2);
  for (auto& p : s.points) p.normal = {0.0, 0.0, -1.0};
  HiddenScene m = s;
  for (auto& p : m.points) p.position[0] = -p.position[0];
  const PulseModel pulse = PulseModel::gaussian(300.0, 132.0);
  const TransientCube a = render_confocal(s, g, pulse), b = render_confocal(m, g, pulse);
  for (int64_t i = 0; i < 8; ++i)
    for (int64_t j = 0; j < 8; ++j)
      for (int64_t n = 0; n < 128; ++n) EXPECT_NEAR(a.at(i, j, n), b.at(i, 7 - j, n), 1e-12);
}

TEST(Confocal, Superposition) {
  const ScanGrid g{6, 6, 1.0, 128, 132.0};
  const HiddenScene a = random_scene(3, 3), b = random_scene(4, 4);
  HiddenScene ab = a;
  ab.points.insert(ab.points.end(), b.points.begin(), b.points.end());
  const PulseModel pulse = PulseModel::gaussian(300.0, 132.0);
  const TransientCube ra = render_confocal(a, g, pulse), rb = render_confocal(b, g, pulse);
  const TransientCube rab = render_confocal(ab, g, pulse);
  for (size_t i = 0; i < rab.values().size(); ++i) EXPECT_NEAR(rab.values()[i], ra.values()[i] + rb.values()[i], 1e-12);
}

TEST(Confocal, EarliestBinMatchesNearestPoint) {
  const ScanGrid g{6, 6, 1.0, 128, 132.0};
  HiddenScene s = random_scene(4, 5);
  for (auto& p : s.points) p.normal = {0.0, 0.0, -1.0};
  const TransientCube cube = render_confocal(s, g, PulseModel::from_kernels({1.0}));
  for (int64_t i = 0; i < 6; ++i)
    for (int64_t j = 0; j < 6; ++j) {
      double nearest = 1e9;
      for (const auto& p : s.points) {
        const double dx = g.wall_x(j) - p.position[0], dy = g.wall_y(i) - p.position[1];
        nearest = std::min(nearest, std::sqrt(dx * dx + dy * dy + p.position[2] * p.position[2]));
      }
      int64_t first = -1;
      for (int64_t n = 0; n < 128 && first < 0; ++n)
        if (cube.at(i, j, n) > 0.0) first = n;
      EXPECT_EQ(first, std::llround(nearest / meters_per_bin(132.0)));
    }
}

TEST(Confocal, BeyondRangeThrows) {
  HiddenScene s;
  s.points.push_back(point(0, 0, 5.0));
  EXPECT_THROW(render_confocal(s, ScanGrid{4, 4, 1.0, 64, 132.0}, PulseModel::gaussian(300, 132)), RangeError);
}

TEST(Confocal, PhotonBudgetScalesWithCycles) {
  const ScanGrid g{8, 8, 1.0, 128, 132.0};
  const TransientCube rates = render_confocal(random_scene(5, 6), g, PulseModel::gaussian(300, 132));
  DetectionModel a;
  a.cycles = 1000;
  DetectionModel b = a;
  b.cycles = 2000;
  const auto sa = expected_signal(rates, a), sb = expected_signal(rates, b);
  for (size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sb[i], 2.0 * sa[i], 1e-9);
  DetectionModel bg;
  bg.background = 1.0;
  const TransientCube zero(100, 100, 10, 132.0, CubeKind::rates);
  const TransientCube counts = poisson_detect(zero, bg, 4);
  EXPECT_NEAR(std::accumulate(counts.values().begin(), counts.values().end(), 0.0) / 1e5, 1.0, 0.02);
}

TEST(GtViews, SinglePointAndNearest) {
  const ScanGrid g{4, 4, 1.0, 128, 132.0};
  HiddenScene s;
  s.points.push_back(point(g.wall_x(1), g.wall_y(2), 0.7, 0.6));
  auto [img, depth] = gt_views(s, g);
  EXPECT_EQ(depth.valid_count(), 1);
  EXPECT_DOUBLE_EQ(img.at(2, 1), 0.6);
  EXPECT_DOUBLE_EQ(depth.at(2, 1), 0.7);
  s.points = {point(0.1, 0.1, 0.9), point(0.1, 0.1, 0.5)};
  auto [img2, depth2] = gt_views(s, g);
  EXPECT_DOUBLE_EQ(depth2.at(2, 2), 0.5);
}

TEST(GtViews, MatchesProjectionOracle) {
  const ScanGrid g{8, 8, 1.0, 128, 132.0};
  const HiddenScene s = random_scene(20, 7);
  auto [img, depth] = gt_views(s, g);
  for (int64_t i = 0; i < 8; ++i)
    for (int64_t j = 0; j < 8; ++j) {
      double a = 0.0, z = 1e9;
      bool any = false;
      for (const auto& p : s.points) {
        const int64_t col = static_cast<int64_t>(std::floor((p.position[0] + 0.5) * 8));
        const int64_t row = static_cast<int64_t>(std::floor((p.position[1] + 0.5) * 8));
        if (row == i && col == j) {
          any = true;
          a = std::max(a, p.albedo);
          z = std::min(z, p.position[2]);
        }
      }
      EXPECT_EQ(depth.is_valid(i, j), any);
      EXPECT_DOUBLE_EQ(img.at(i, j), a);
      if (any) EXPECT_DOUBLE_EQ(depth.at(i, j), z);
    }
}

TEST(HiddenScene, JsonRoundTrip) {
  const HiddenScene s = random_scene(7, 8);
  const fs::path p = fs::temp_directory_path() / "trtkit_unit_scene.json";
  save_hidden_scene(s, p);
  const HiddenScene back = load_hidden_scene(p);
  ASSERT_EQ(back.points.size(), s.points.size());
  for (size_t i = 0; i < s.points.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(back.points[i].position[k], s.points[i].position[k]);
      EXPECT_DOUBLE_EQ(back.points[i].normal[k], s.points[i].normal[k]);
    }
    EXPECT_DOUBLE_EQ(back.points[i].albedo, s.points[i].albedo);
  }
}

TEST(HiddenScene, ProceduralFitsRange) {
  const ScanGrid g{16, 16, 1.0, 64, 264.0};
  const HiddenScene s = procedural_hidden_scene(g, {}, 3);
  EXPECT_FALSE(s.points.empty());
  EXPECT_NO_THROW(render_confocal(s, g, PulseModel::gaussian(300, 264)));
}

TEST(Fk, ZeroCubeGivesZeroVolume) {
  FkMigration fk(8, 32, 1.0, 132.0);
  const Tensor v = fk.apply(Tensor({8, 8, 32}, 0.0));
  EXPECT_EQ(v.max_abs(), 0.0);
}

TEST(Fk, LinearAndAdjoint) {
  FkMigration fk(8, 32, 1.0, 132.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor x({8, 8, 32}), y({8, 8, 32});
  for (double& v : x.values()) v = n(rng);
  for (double& v : y.values()) v = n(rng);
  Tensor combo = x;
  combo *= 2.5;
  Tensor y3 = y;
  y3 *= -0.7;
  combo += y3;
  const Tensor fx = fk.apply(x), fy = fk.apply(y), fc = fk.apply(combo);
  for (int64_t i = 0; i < fc.size(); ++i) EXPECT_NEAR(fc[i], 2.5 * fx[i] - 0.7 * fy[i], 1e-10);
  const Tensor aty = fk.adjoint(y);
  double lhs = 0.0, rhs = 0.0;
  for (int64_t i = 0; i < x.size(); ++i) {
    lhs += fx[i] * y[i];
    rhs += x[i] * aty[i];
  }
  EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(lhs)));
}

TEST(Fk, SingleScattererAgreesWithBackprojection) {
  const ScanGrid g{16, 16, 1.0, 128, 132.0};
  HiddenScene s;
  s.points.push_back(point(g.wall_x(5), g.wall_y(9), 0.6));
  const TransientCube cube = render_confocal(s, g, PulseModel::gaussian(300, 132));
  const Tensor vol = fk_migrate(cube, g.extent);
  const auto got = argmax3(vol);
  const auto bp = argmax3(oracle::backprojection(cube, g.extent));
  const int64_t z = std::llround(0.6 / meters_per_bin(132.0));
  EXPECT_LE(std::abs(got[0] - 9), 1);
  EXPECT_LE(std::abs(got[1] - 5), 1);
  EXPECT_LE(std::abs(got[2] - z), 1);
  for (int k = 0; k < 3; ++k) EXPECT_LE(std::abs(got[k] - bp[k]), 1);
}

TEST(Fk, TwoScatterersGiveTwoLocalMaxima) {
  const ScanGrid g{16, 16, 1.0, 128, 132.0};
  HiddenScene s;
  s.points.push_back(point(g.wall_x(3), g.wall_y(4), 0.5));
  s.points.push_back(point(g.wall_x(12), g.wall_y(11), 0.8));
  const TransientCube cube = render_confocal(s, g, PulseModel::gaussian(300, 132));
  const Tensor vol = fk_migrate(cube, g.extent);
  auto local_max_near = [&](int64_t y, int64_t x, int64_t z) {
    // Best voxel within +-1 of the truth must beat everything in a +-3 shell around it.
    double inner = -1e300, outer = -1e300;
    for (int64_t a = -3; a <= 3; ++a)
      for (int64_t b = -3; b <= 3; ++b)
        for (int64_t c = -3; c <= 3; ++c) {
          const int64_t yy = y + a, xx = x + b, zz = z + c;
          if (yy < 0 || yy >= 16 || xx < 0 || xx >= 16 || zz < 0 || zz >= 128) continue;
          const double v = vol.at({yy, xx, zz});
          if (std::abs(a) <= 1 && std::abs(b) <= 1 && std::abs(c) <= 1) inner = std::max(inner, v);
          else outer = std::max(outer, v);
        }
    return inner > outer;
  };
  const double bm = meters_per_bin(132.0);
  EXPECT_TRUE(local_max_near(4, 3, std::llround(0.5 / bm)));
  EXPECT_TRUE(local_max_near(11, 12, std::llround(0.8 / bm)));
}

TEST(Fk, LateralShiftMovesArgmax) {
  const ScanGrid g{16, 16, 1.0, 128, 132.0};
  const PulseModel pulse = PulseModel::gaussian(300, 132);
  for (int shift : {0, 2, 4}) {
    HiddenScene s;
    s.points.push_back(point(g.wall_x(6 + shift), g.wall_y(7), 0.55));
    const auto got = argmax3(fk_migrate(render_confocal(s, g, pulse), g.extent));
    EXPECT_LE(std::abs(got[1] - (6 + shift)), 1);
    EXPECT_LE(std::abs(got[0] - 7), 1);
  }
}

TEST(NlosDataset, GeneratesAndLoads) {
  NlosDatasetOptions o;
  o.count = 2;
  o.scan = ScanGrid{8, 8, 1.0, 64, 264.0};
  o.seed = 4;
  const fs::path dir = fs::temp_directory_path() / "trtkit_unit" / "nlos_ds";
  fs::remove_all(dir);
  generate_nlos_dataset(o, dir);
  const auto samples = load_nlos_dataset(dir);
  ASSERT_EQ(samples.size(), 2u);
  const NlosSample direct = simulate_nlos_sample(o, 1);
  EXPECT_EQ(samples[1].cube, direct.cube);
  EXPECT_EQ(samples[1].label(), "200:10");
  EXPECT_EQ(samples[1].intensity.height, 8);
}
