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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Usage: trtkit_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <json.hpp>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "trtkit/attention.hpp"
#include "trtkit/baselines.hpp"
#include "trtkit/dataset.hpp"
#include "trtkit/error.hpp"
#include "trtkit/fk.hpp"
#include "trtkit/gradcheck_suite.hpp"
#include "trtkit/harness.hpp"
#include "trtkit/los_sim.hpp"
#include "trtkit/metrics.hpp"
#include "trtkit/nlos_sim.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/params.hpp"
#include "trtkit/scene_gen.hpp"
#include "trtkit/trt_los.hpp"
#include "trtkit/trt_nlos.hpp"

using namespace trtkit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Tensor randn(const Shape& s, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  Tensor t(s);
  for (double& v : t.values()) v = d(rng);
  return t;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void perturb_norms(ParameterSet& ps, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 0.2);
  for (const std::string& n : ps.names())
    if (n.ends_with(".gamma") || n.ends_with(".beta"))
      for (double& v : ps.get(n).mutable_value().values()) v += d(rng);
}

// 1. Finite-difference gradient suite.
Outcome criterion1() {
  const GradcheckReport r = run_gradcheck_suite("all", 7);
  const std::vector<std::string> required{"msa",          "ffn",         "stsa_local",     "stsa_global", "stca",
                                          "decoder_LGInt", "temporal_pixelshuffle", "pixelshuffle_3d", "soft_argmax",
                                          "kl",           "tv",          "denoiser",       "fusion_head", "fusion"};
  std::set<std::string> names;
  double worst = 0.0;
  std::string failed;
  for (const GradcheckEntry& e : r.entries) {
    names.insert(e.name);
    worst = std::max(worst, e.result.max_rel_error);
    if (!e.result.passed) failed += " " + e.module + "/" + e.name;
  }
  std::string missing;
  for (const std::string& n : required)
    if (!names.count(n)) missing += " " + n;
  Outcome o;
  o.pass = r.passed() && missing.empty() && r.seconds < 120.0;
  o.detail = fmt("%zu checks, worst rel err %.2e, %.1f s", r.entries.size(), worst, r.seconds);
  if (!failed.empty()) o.detail += "; failed:" + failed;
  if (!missing.empty()) o.detail += "; missing:" + missing;
  return o;
}

// 2. Library vs scalar-loop oracles.
Outcome criterion2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<std::string, double>> errs;
  ParameterSet ps;
  Initializer init(5);

  double e_msa = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const EncoderParams p = make_encoder_params(ps, init, "msa" + std::to_string(trial), 8);
    const Tensor x = randn({3, 5, 8}, rng);
    const Tensor got = msa(Var(x), p.msa_s, 2).value();
    for (int64_t b = 0; b < 3; ++b) {
      const std::vector<double> tokens(x.data() + b * 40, x.data() + (b + 1) * 40);
      const auto want = oracle::msa(tokens, 5, p.msa_s, 2);
      e_msa = std::max(e_msa, max_abs_diff({got.data() + b * 40, 40}, want));
    }
  }
  errs.emplace_back("msa", e_msa);

  double e_stca = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    const DecoderParams p = make_decoder_params(ps, init, "stca" + std::to_string(trial), 3);
    perturb_norms(ps, rng);
    const Tensor q = randn({2, 3, 4, 3}, rng), kv = randn({2, 3, 4, 3}, rng);
    e_stca = std::max(e_stca, max_abs_diff(stca(Var(q), Var(kv), p.stca_local).value().values(),
                                           oracle::stca(q, kv, p.stca_local).values()));
  }
  errs.emplace_back("stca", e_stca);

  double e_sa = 0.0;
  const Tensor h = randn({4, 4, 32}, rng, 2.0);
  const Tensor d = soft_argmax_depth(Var(h), 0.7).value();
  for (int64_t p = 0; p < 16; ++p)
    e_sa = std::max(e_sa, std::abs(d[p] - oracle::soft_argmax({h.data() + p * 32, h.data() + (p + 1) * 32}, 0.7)));
  errs.emplace_back("soft_argmax", e_sa);

  const Tensor dm = randn({7, 9}, rng);
  errs.emplace_back("tv", std::abs(tv_loss(Var(dm)).value()[0] - oracle::tv(dm)));

  DepthMap a(12, 12), b(12, 12);
  for (size_t i = 0; i < a.values.size(); ++i) {
    a.values[i] = u(rng);
    b.values[i] = u(rng);
    b.valid[i] = u(rng) < 0.8;
  }
  IntensityImage ia(16, 16), ib(16, 16);
  for (size_t i = 0; i < ia.values.size(); ++i) {
    ia.values[i] = u(rng);
    ib.values[i] = std::clamp(ia.values[i] + 0.1 * (u(rng) - 0.5), 0.0, 1.0);
  }
  double e_metrics = std::abs(rmse(a, b) - oracle::rmse(a, b));
  e_metrics = std::max(e_metrics, std::abs(mad(a, b) - oracle::mad(a, b)));
  e_metrics = std::max(e_metrics, std::abs(psnr(ia, ib, 1.0) - oracle::psnr(ia, ib, 1.0)));
  e_metrics = std::max(e_metrics, std::abs(ssim(ia, ib, 1.0) - oracle::ssim(ia, ib, 1.0)));
  errs.emplace_back("metrics", e_metrics);

  double e_lm = 0.0;
  const PulseModel pulse = PulseModel::gaussian(400.0, 80.0, 100.0);
  std::poisson_distribution<int> pois(2.0);
  TransientCube cube(3, 3, 48, 80.0, CubeKind::counts);
  for (double& v : cube.values()) v = pois(rng);
  const DepthMap lm = log_matched_filter(cube, pulse);
  for (int64_t p = 0; p < 9; ++p) {
    const auto hs = cube.histogram(p / 3, p % 3);
    const std::vector<double> hv(hs.begin(), hs.end());
    const auto want = oracle::lm_scores(hv, pulse.kernel, kLogMatchedEpsilon);
    e_lm = std::max(e_lm, max_abs_diff(log_matched_scores(hv, pulse.kernel), want));
    if (lm.valid[static_cast<size_t>(p)]) {
      const double z = static_cast<double>(oracle::argmax_first(want)) * meters_per_bin(80.0);
      e_lm = std::max(e_lm, std::abs(lm.values[static_cast<size_t>(p)] - z));
    }
  }
  errs.emplace_back("lm", e_lm);

  Outcome o;
  o.pass = true;
  for (const auto& [name, e] : errs) {
    o.pass = o.pass && e <= 1e-10;
    o.detail += fmt("%s%s %.1e", o.detail.empty() ? "" : ", ", name.c_str(), e);
  }
  return o;
}

// 3. Local and global encoders coincide when one window covers the volume.
Outcome criterion3() {
  ParameterSet ps;
  Initializer init(31);
  std::mt19937_64 rng(32);
  const EncoderParams p = make_encoder_params(ps, init, "e", 8);
  perturb_norms(ps, rng);
  AttentionConfig cfg;
  cfg.channels = 8;
  cfg.heads = 2;
  cfg.window_spatial = 4;
  cfg.window_temporal = 8;
  cfg.global_downsample = 1;
  const Tensor x = randn({4, 4, 8, 8}, rng);
  const double e = max_abs_diff(stsa_local(Var(x), p, cfg).value().values(), stsa_global(Var(x), p, cfg).value().values());
  return {e <= 1e-6, fmt("max |local - global| = %.2e", e)};
}

// 4. Poisson moments and SBR calibration over the 12-label grid.
Outcome criterion4() {
  Outcome o{true, ""};
  const int64_t draws = 100000;
  for (double lambda : {0.5, 5.0, 40.0}) {
    const TransientCube rates(100, 100, 10, 80.0, CubeKind::rates);
    DetectionModel det;
    det.background = lambda;
    const TransientCube c = poisson_detect(rates, det, static_cast<uint64_t>(lambda * 100));
    double m = 0.0, m2 = 0.0;
    for (double v : c.values()) {
      m += v;
      m2 += v * v;
    }
    m /= draws;
    const double var = m2 / draws - m * m;
    const double se_mean = std::sqrt(lambda / draws);
    // Var of the sample variance for Poisson: (mu4 - sigma^4) / n with mu4 = lambda (1 + 3 lambda).
    const double se_var = std::sqrt((lambda * (1.0 + 3.0 * lambda) - lambda * lambda) / draws);
    const bool ok = std::abs(m - lambda) <= 3.0 * se_mean && std::abs(var - lambda) <= 3.0 * se_var;
    o.pass = o.pass && ok;
    o.detail += fmt("lambda %.1f: mean %.4f var %.4f; ", lambda, m, var);
  }
  SceneLOS scene(100, 100);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (size_t i = 0; i < scene.depth.size(); ++i) {
    scene.depth[i] = 0.5 + 0.8 * u(rng);
    scene.albedo[i] = 0.2 + 0.8 * u(rng);
  }
  const int64_t bins = 128;
  const TransientCube rates = ideal_transient(scene, PulseModel::gaussian(400, 80), bins, 80.0);
  double worst = 0.0;
  uint64_t seed = 100;
  for (const SbrLevel& level : standard_sbr_grid()) {
    const DetectionModel det = calibrate_sbr(rates, {}, level.signal, level.background);
    DetectionModel sig = det, bg = det;
    sig.background = 0.0;
    bg.attenuation.assign(bg.attenuation.size(), 0.0);
    const TransientCube ns = poisson_detect(rates, sig, ++seed);
    const TransientCube nb = poisson_detect(rates, bg, ++seed);
    const double px = static_cast<double>(rates.pixels());
    const double ms = std::accumulate(ns.values().begin(), ns.values().end(), 0.0) / px;
    const double mb = std::accumulate(nb.values().begin(), nb.values().end(), 0.0) / px;
    worst = std::max({worst, std::abs(ms - level.signal) / level.signal, std::abs(mb - level.background) / level.background});
  }
  o.pass = o.pass && worst <= 0.02;
  o.detail += fmt("12 SBR labels, worst budget error %.3f%%", 100.0 * worst);
  return o;
}

std::array<int64_t, 3> argmax3(const Tensor& v) {
  int64_t best = 0;
  for (int64_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  const int64_t w = v.dim(1), t = v.dim(2);
  return {best / (w * t), (best / t) % w, best % t};
}

// 5. FK migration localisation and linearity.
Outcome criterion5() {
  // 528 ps bins give 32 bins enough range for the far wall corners.
  const double bw = 528.0;
  const ScanGrid g{32, 32, 1.0, 32, bw};
  const PulseModel pulse = PulseModel::gaussian(1000, bw);
  const double bm = meters_per_bin(bw);
  Outcome o{true, ""};
  const std::array<std::array<int64_t, 3>, 3> truths{{{9, 20, 20}, {16, 16, 24}, {24, 7, 15}}};
  for (const auto& t : truths) {
    HiddenScene s;
    ScenePoint p;
    p.position = {g.wall_x(t[1]), g.wall_y(t[0]), static_cast<double>(t[2]) * bm};
    s.points.push_back(p);
    const TransientCube cube = render_confocal(s, g, pulse);
    const auto got = argmax3(fk_migrate(cube, g.extent));
    const auto bp = argmax3(oracle::backprojection(cube, g.extent));
    bool ok = true;
    for (int k = 0; k < 3; ++k) ok = ok && std::abs(got[k] - t[k]) <= 1 && std::abs(got[k] - bp[k]) <= 1;
    o.pass = o.pass && ok;
    o.detail += fmt("truth (%lld,%lld,%lld) fk (%lld,%lld,%lld) bp (%lld,%lld,%lld); ", (long long)t[0],
                    (long long)t[1], (long long)t[2], (long long)got[0], (long long)got[1], (long long)got[2],
                    (long long)bp[0], (long long)bp[1], (long long)bp[2]);
  }
  FkMigration fk(32, 32, 1.0, bw);
  std::mt19937_64 rng(55);
  const Tensor x = randn({32, 32, 32}, rng), y = randn({32, 32, 32}, rng);
  Tensor c = x;
  c *= 1.7;
  Tensor y2 = y;
  y2 *= -0.4;
  c += y2;
  const Tensor fx = fk.apply(x), fy = fk.apply(y), fc = fk.apply(c);
  double e = 0.0;
  for (int64_t i = 0; i < fc.size(); ++i) e = std::max(e, std::abs(fc[i] - (1.7 * fx[i] - 0.4 * fy[i])));
  o.pass = o.pass && e <= 1e-10;
  o.detail += fmt("linearity err %.1e", e);
  return o;
}

LosDatasetOptions los_scenes(const SbrLevel& level) {
  LosDatasetOptions d;
  d.count = 8;
  d.grid = {level};
  d.seed = 606;
  return d;
}

// Pooled soft-argmax RMSE in bins over every valid pixel of every sample.
double pooled_rmse_bins(const TrtLos& model, const std::vector<LosSample>& data) {
  double se = 0.0;
  int64_t n = 0;
  for (const LosSample& s : data) {
    const LosReconstruction r = reconstruct_los(model, s.cube);
    const DepthMap gt = depth_to_bins(s.depth, s.cube.bin_width_ps());
    for (size_t i = 0; i < gt.values.size(); ++i) {
      if (!gt.valid[i]) continue;
      const double e = r.depth_bins.values[i] - gt.values[i];
      se += e * e;
      ++n;
    }
  }
  return n ? std::sqrt(se / static_cast<double>(n)) : INFINITY;
}

std::unique_ptr<TrtLos> g_los_model;

// 6. LOS overfit on 8 desk-scale scenes within 10 minutes.
Outcome criterion6() {
  const auto t0 = Clock::now();
  std::vector<LosSample> data;
  for (int64_t i = 0; i < 8; ++i) data.push_back(simulate_los_sample(los_scenes({10.0, 2.0}), i));
  TrainConfig cfg = TrainConfig::defaults(Task::los);
  cfg.los.attention.blocks = 1;
  cfg.los.attention.channels = 16;
  cfg.optimizer.lr = 2e-3;
  cfg.optimizer.weight_decay = 0.0;
  cfg.batch_size = 1;
  cfg.epochs = 100000;
  cfg.seed = 6;
  auto model = std::make_unique<TrtLos>(cfg.los, cfg.seed);
  const double budget = 600.0;
  double rmse_now = pooled_rmse_bins(*model, data);
  const double rmse_start = rmse_now;
  int64_t steps = 0;
  train_los(*model, data, cfg, [&](int64_t step, double) {
    steps = step + 1;
    if (steps % 16 == 0) rmse_now = pooled_rmse_bins(*model, data);
    return rmse_now >= 2.0 && since(t0) < budget;
  });
  rmse_now = pooled_rmse_bins(*model, data);
  const double secs = since(t0);
  g_los_model = std::move(model);
  return {rmse_now < 2.0 && secs <= budget,
          fmt("RMSE %.3f -> %.3f bins after %lld steps in %.0f s", rmse_start, rmse_now, (long long)steps, secs)};
}

NlosModelConfig nlos_desk_config(bool denoiser) {
  NlosModelConfig c;
  c.grid = 16;
  c.bins = 64;
  c.use_denoiser = denoiser;
  c.attention.blocks = 1;
  c.attention.channels = 8;
  c.attention.heads = 2;
  c.attention.window_spatial = 4;
  c.attention.window_temporal = 2;
  c.attention.global_downsample = 2;
  return c;
}

// 7. NLOS overfit on one scene, with and without the denoiser.
Outcome criterion7() {
  NlosDatasetOptions d;
  d.seed = 707;
  const NlosSample sample = simulate_nlos_sample(d, 0);
  Outcome o{true, ""};
  for (bool denoiser : {true, false}) {
    const auto t0 = Clock::now();
    TrainConfig cfg = TrainConfig::defaults(Task::nlos);
    cfg.nlos = nlos_desk_config(denoiser);
    cfg.optimizer.lr = 2e-3;
    cfg.optimizer.weight_decay = 0.0;
    cfg.lr_decay = 1.0;
    cfg.batch_size = 1;
    cfg.epochs = 100000;
    cfg.seed = 7;
    TrtNlos model(cfg.nlos, cfg.seed);
    RunReport eval = evaluate_nlos(model, {sample});
    auto done = [&]() { return eval.buckets[0].rmse_bins <= 2.0 && eval.buckets[0].psnr >= 25.0; };
    const double budget = 600.0;
    const RunReport r = train_nlos(model, {sample}, cfg, [&](int64_t step, double) {
      if ((step + 1) % 10 == 0) eval = evaluate_nlos(model, {sample});
      return !done() && since(t0) < budget;
    });
    eval = evaluate_nlos(model, {sample});
    const double secs = since(t0);
    const auto& l = r.step_losses;
    const size_t k = std::min<size_t>(10, l.size() / 2);
    const double first = std::accumulate(l.begin(), l.begin() + static_cast<long>(k), 0.0) / static_cast<double>(k);
    const double last = std::accumulate(l.end() - static_cast<long>(k), l.end(), 0.0) / static_cast<double>(k);
    const bool finite = std::all_of(l.begin(), l.end(), [](double v) { return std::isfinite(v); });
    const bool converged = finite && last <= 0.5 * first;
    const bool ok = denoiser ? done() && secs <= budget : converged;
    o.pass = o.pass && ok;
    o.detail += fmt("%s: depth RMSE %.2f V-bins, PSNR %.2f dB, loss %.4f -> %.4f, %zu steps, %.0f s; ",
                    denoiser ? "denoiser" : "no denoiser", eval.buckets[0].rmse_bins, eval.buckets[0].psnr, first, last,
                    l.size(), secs);
  }
  return o;
}

// 8. The criterion-6 model degrades as the noise increases.
Outcome criterion8() {
  if (!g_los_model) criterion6();
  std::vector<double> rmses;
  Outcome o{true, ""};
  for (const SbrLevel level : {SbrLevel{10, 2}, SbrLevel{2, 10}, SbrLevel{1, 100}}) {
    LosDatasetOptions d = los_scenes(level);
    std::vector<LosSample> data;
    for (int64_t i = 0; i < 8; ++i) data.push_back(simulate_los_sample(d, i));
    rmses.push_back(pooled_rmse_bins(*g_los_model, data));
    o.detail += fmt("%s %.3f bins; ", level.label().c_str(), rmses.back());
  }
  o.pass = rmses[0] <= rmses[1] && rmses[1] <= rmses[2];
  return o;
}

#ifdef TRTKIT_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRTKIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reports carry wall-clock timings; everything else must match.
std::string without_timings(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::function<void(nlohmann::json&)> strip = [&](nlohmann::json& v) {
    if (v.is_object()) {
      v.erase("wall_seconds");
      v.erase("seconds");
      for (auto& [k, x] : v.items()) strip(x);
    } else if (v.is_array()) {
      for (auto& x : v) strip(x);
    }
  };
  strip(j);
  return j.dump();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("trtkit_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// 9. Every CLI path reproduces its outputs bit for bit; cubes round-trip exactly.
Outcome criterion9() {
  Outcome o{true, ""};
  const fs::path root = scratch_dir("c9");
  std::mt19937_64 rng(9);
  std::poisson_distribution<int> pois(4.0);
  std::uniform_real_distribution<float> uf(0.0f, 3.0f);
  TransientCube counts(5, 7, 33, 80.0, CubeKind::counts), rates(4, 4, 16, 132.0, CubeKind::rates);
  for (double& v : counts.values()) v = pois(rng);
  for (double& v : rates.values()) v = uf(rng);
  for (const TransientCube* c : {&counts, &rates}) {
    save_cube(*c, root / "rt.trtc");
    const TransientCube back = load_cube(root / "rt.trtc");
    save_cube(back, root / "rt2.trtc");
    const bool ok = back == *c && slurp(root / "rt.trtc") == slurp(root / "rt2.trtc");
    o.pass = o.pass && ok;
  }
  o.detail += o.pass ? "cube round trip exact; " : "cube round trip differs; ";
#ifdef TRTKIT_CLI_PATH
  const std::string model =
      " --blocks 1 --channels 8 --heads 2 --window-spatial 2 --window-temporal 2 --global-downsample 2 --batch-size 2";
  struct Path {
    std::string name, args;
    std::vector<std::string> outputs;
  };
  auto runs = [&](const std::string& tag) {
    const std::string d = (root / tag).string() + "/";
    return std::vector<Path>{
        {"simulate-los", "simulate-los --scenes 2 --size 8x8x32 --sbr 10:2,2:50 --seed 3 --deterministic --out " + d + "los",
         {"los/cube_0000.trtc", "los/cube_0001.trtc", "los/depth_0000.png", "los/manifest.json"}},
        {"simulate-nlos", "simulate-nlos --scenes 1 --grid 8 --bins 32 --bin-width-ps 528 --seed 3 --deterministic --out " + d + "nlos",
         {"nlos/cube_0000.trtc", "nlos/manifest.json"}},
        {"train-los", "train-los --data " + d + "los" + model + " --max-steps 3 --seed 4 --deterministic --ckpt " + d +
                          "los.ckpt --report " + d + "train_los.json",
         {"los.ckpt", "train_los.json"}},
        {"train-nlos", "train-nlos --data " + d + "nlos" + model + " --max-steps 2 --seed 4 --deterministic --ckpt " +
                           d + "nlos.ckpt --report " + d + "train_nlos.json",
         {"nlos.ckpt", "train_nlos.json"}},
        {"eval-los", "eval-los --ckpt " + d + "los.ckpt --data " + d + "los --report " + d + "eval_los.json",
         {"eval_los.json"}},
        {"eval-nlos", "eval-nlos --ckpt " + d + "nlos.ckpt --data " + d + "nlos --report " + d + "eval_nlos.json",
         {"eval_nlos.json"}},
        {"reconstruct-los", "reconstruct-los --ckpt " + d + "los.ckpt --cube " + d + "los/cube_0000.trtc --out " + d + "rl",
         {"rl/depth.png", "rl/depth_filtered.png", "rl/intensity.png"}},
        {"reconstruct-nlos", "reconstruct-nlos --emit-volume --ckpt " + d + "nlos.ckpt --cube " + d +
                                 "nlos/cube_0000.trtc --out " + d + "rn",
         {"rn/depth.png", "rn/intensity.png", "rn/volume.trtc", "rn/volume.json"}},
        {"baseline-lm", "baseline --method lm --cube " + d + "los/cube_0000.trtc --out " + d + "lm.png", {"lm.png"}},
        {"baseline-argmax", "baseline --method argmax --cube " + d + "los/cube_0000.trtc --out " + d + "am.png",
         {"am.png"}},
        {"gradcheck", "gradcheck --module ops --seed 3 --report " + d + "gc.json", {"gc.json"}},
    };
  };
  const auto a = runs("a"), b = runs("b");
  int reproduced = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    bool ok = run_cli(a[i].args) == 0 && run_cli(b[i].args) == 0;
    for (const std::string& out : a[i].outputs) {
      const fs::path pa = root / "a" / out, pb = root / "b" / out;
      if (!ok || !fs::exists(pa) || !fs::exists(pb)) {
        ok = false;
        break;
      }
      std::string sa = slurp(pa), sb = slurp(pb);
      if (out.ends_with(".json") && out.find("manifest") == std::string::npos && out.find("volume") == std::string::npos) {
        sa = without_timings(sa);
        sb = without_timings(sb);
      }
      ok = ok && sa == sb;
    }
    if (ok) {
      ++reproduced;
    } else {
      o.detail += a[i].name + " not reproducible; ";
    }
    o.pass = o.pass && ok;
  }
  o.detail += fmt("%d/%zu CLI paths reproducible", reproduced, a.size());
#else
  o.pass = false;
  o.detail += "CLI not built";
#endif
  fs::remove_all(root.parent_path());
  return o;
}

// 10. Every ablation configuration completes a 50-step smoke run.
Outcome criterion10() {
#ifdef TRTKIT_CLI_PATH
  const fs::path root = scratch_dir("c10");
  Outcome o{true, ""};
  if (run_cli("simulate-los --scenes 2 --size 16x16x64 --sbr 5:2 --seed 10 --out " + (root / "data").string()) != 0)
    return {false, "simulation failed"};
  const std::string base = "train-los --data " + (root / "data").string() +
                           " --blocks 1 --channels 8 --heads 2 --window-spatial 2 --window-temporal 2"
                           " --global-downsample 2 --batch-size 1 --epochs 25 --max-steps 50 --lr 1e-3 --seed 10 --deterministic"
                           " --ckpt " + (root / "m.ckpt").string() + " --report " + (root / "r.json").string();
  const std::vector<std::pair<std::string, std::string>> variants{
      {"NoInt", "--integration NoInt"},         {"LocInt", "--integration LocInt"},
      {"GloInt", "--integration GloInt"},       {"LGInt", "--integration LGInt"},
      {"S-only", "--attention-axes spatial"},   {"T-only", "--attention-axes temporal"},
      {"S+T", "--attention-axes both"}};
  for (const auto& [name, flag] : variants) {
    fs::remove(root / "r.json");
    const int code = run_cli(base + " " + flag);
    bool ok = code == 0 && fs::exists(root / "r.json");
    size_t steps = 0;
    if (ok) {
      const nlohmann::json r = nlohmann::json::parse(slurp(root / "r.json"));
      const auto& losses = r.at("step_losses");
      steps = losses.size();
      for (const auto& l : losses) ok = ok && l.is_number() && std::isfinite(l.get<double>());
      ok = ok && steps == 50;
    }
    o.pass = o.pass && ok;
    o.detail += fmt("%s %s (exit %d, %zu steps); ", name.c_str(), ok ? "ok" : "FAILED", code, steps);
  }
  fs::remove_all(root.parent_path());
  return o;
#else
  return {false, "CLI not built"};
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  const char* titles[] = {"gradient suite",           "oracle equivalence",     "local/global degeneracy",
                          "simulator statistics",     "FK migration",           "LOS overfit",
                          "NLOS overfit",             "noise monotonicity",     "determinism",
                          "ablation surface"};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::printf("%s %2d %-24s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, titles[i], o.detail.c_str(), since(t0));
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
