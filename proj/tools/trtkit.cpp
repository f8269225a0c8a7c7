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

// trtkit command-line tool: simulation, training, evaluation, reconstruction.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "trtkit/baselines.hpp"
#include "trtkit/dataset.hpp"
#include "trtkit/error.hpp"
#include "trtkit/gradcheck_suite.hpp"
#include "trtkit/harness.hpp"
#include "trtkit/image_io.hpp"

namespace fs = std::filesystem;
using namespace trtkit;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text << '\n';
}

struct Size3 {
  int64_t h = 0, w = 0, t = 0;
};

Size3 parse_size(const std::string& s) {
  Size3 r;
  char x1 = 0, x2 = 0;
  std::istringstream in(s);
  if (!(in >> r.h >> x1 >> r.w >> x2 >> r.t) || x1 != 'x' || x2 != 'x' || r.h < 1 || r.w < 1 || r.t < 1) {
    throw ConfigError("size must look like HxWxT, got " + s);
  }
  return r;
}

template <typename T>
void apply(std::optional<T>& src, T& dst) {
  if (src) dst = *src;
}

/// Flags shared by train-los and train-nlos; unset flags leave the
/// (config-file or default) value alone.
struct TrainFlags {
  std::string config;
  std::string data, ckpt, report;
  std::optional<int> blocks, channels, heads, window_spatial, window_temporal, global_downsample, epochs, batch_size;
  std::optional<int64_t> max_steps;
  std::optional<double> lr, weight_decay, lr_decay, gamma, alpha, beta;
  std::optional<uint64_t> seed;
  std::optional<std::string> integration, attention_axes;
  std::optional<bool> no_denoiser;
  bool deterministic = false;

  void attach(CLI::App* app, Task task) {
    app->add_option("--config", config, "JSON training configuration")->check(CLI::ExistingFile);
    app->add_option("--data", data, "Dataset directory");
    app->add_option("--ckpt", ckpt, "Checkpoint output path")->required();
    app->add_option("--report", report, "Run report JSON path");
    app->add_option("--blocks", blocks);
    app->add_option("--channels", channels);
    app->add_option("--heads", heads);
    app->add_option("--window-spatial", window_spatial);
    app->add_option("--window-temporal", window_temporal);
    app->add_option("--global-downsample", global_downsample);
    app->add_option("--integration", integration, "NoInt|LocInt|GloInt|LGInt");
    app->add_option("--attention-axes", attention_axes, "Attention dimensions: spatial|temporal|both")
        ->check(CLI::IsMember({"spatial", "temporal", "both"}));
    app->add_option("--epochs", epochs);
    app->add_option("--batch-size", batch_size);
    app->add_option("--max-steps", max_steps);
    app->add_option("--lr", lr);
    app->add_option("--weight-decay", weight_decay);
    app->add_option("--lr-decay", lr_decay);
    if (task == Task::los) {
      app->add_option("--gamma", gamma, "TV weight");
    } else {
      app->add_option("--alpha", alpha, "Intensity loss weight");
      app->add_option("--beta", beta, "Depth loss weight");
      app->add_flag("--no-denoiser", no_denoiser);
    }
    app->add_option("--seed", seed);
    app->add_flag("--deterministic", deterministic, "Sequential reductions");
  }

  TrainConfig resolve(Task task) {
    TrainConfig c = TrainConfig::defaults(task);
    if (!config.empty()) c = train_config_from_json(read_text(config), c);
    c.task = task;
    AttentionConfig& a = task == Task::los ? c.los.attention : c.nlos.attention;
    apply(blocks, a.blocks);
    apply(channels, a.channels);
    apply(heads, a.heads);
    apply(window_spatial, a.window_spatial);
    apply(window_temporal, a.window_temporal);
    apply(global_downsample, a.global_downsample);
    if (integration) a.integration = parse_integration(*integration);
    if (attention_axes) {
      a.spatial_attention = *attention_axes != "temporal";
      a.temporal_attention = *attention_axes != "spatial";
    }
    apply(epochs, c.epochs);
    apply(batch_size, c.batch_size);
    apply(max_steps, c.max_steps);
    apply(lr, c.optimizer.lr);
    apply(weight_decay, c.optimizer.weight_decay);
    apply(lr_decay, c.lr_decay);
    apply(gamma, c.los.gamma);
    apply(alpha, c.nlos.alpha);
    apply(beta, c.nlos.beta);
    if (no_denoiser && *no_denoiser) c.nlos.use_denoiser = false;
    apply(seed, c.seed);
    if (deterministic) {
      c.deterministic = true;
      c.threads = 1;
    }
    if (!data.empty()) c.data_dir = data;
    c.checkpoint_path = ckpt;
    if (!report.empty()) c.report_path = report;
    return c;
  }
};

void print_buckets(const RunReport& r) {
  for (const BucketMetrics& b : r.buckets) {
    std::printf("%-8s n=%-3lld rmse=%.4f m (%.3f bins) mad=%.4f m", b.label.c_str(), static_cast<long long>(b.samples),
                b.rmse_m, b.rmse_bins, b.mad_m);
    if (b.has_intensity) std::printf(" psnr=%.2f dB ssim=%.4f", b.psnr, b.ssim);
    std::printf("\n");
  }
  for (const BucketMetrics& g : r.groups) std::printf("avg %-6s rmse=%.4f m mad=%.4f m\n", g.label.c_str(), g.rmse_m, g.mad_m);
}

int run(int argc, char** argv) {
  CLI::App app{"Transient reconstruction toolkit"};
  app.require_subcommand(1);

  // simulate-los
  auto* sim_los = app.add_subcommand("simulate-los", "Simulate a LOS SPAD dataset");
  LosDatasetOptions los_opts;
  std::string los_sbr = "2:2", los_size = "32x32x128", los_out;
  bool los_det = false;
  sim_los->add_option("--scenes", los_opts.count, "Number of samples")->check(CLI::PositiveNumber);
  sim_los->add_option("--sbr", los_sbr, "Comma-separated signal:background levels, or 'all'");
  sim_los->add_option("--size", los_size, "HxWxT");
  sim_los->add_option("--bin-width-ps", los_opts.bin_width_ps);
  sim_los->add_option("--pulse-fwhm-ps", los_opts.pulse_fwhm_ps);
  sim_los->add_option("--jitter-fwhm-ps", los_opts.jitter_fwhm_ps);
  sim_los->add_option("--import-depth", los_opts.import_dir, "Directory of depth PNGs");
  sim_los->add_option("--threads", los_opts.threads);
  sim_los->add_option("--seed", los_opts.seed);
  sim_los->add_flag("--deterministic", los_det);
  sim_los->add_option("--out", los_out)->required();

  // simulate-nlos
  auto* sim_nlos = app.add_subcommand("simulate-nlos", "Simulate a confocal NLOS dataset");
  NlosDatasetOptions nlos_opts;
  nlos_opts.scan = ScanGrid{32, 32, 1.0, 128, 132.0};
  std::string nlos_sbr = "200:10", nlos_out;
  int64_t grid = 32;
  bool nlos_det = false;
  sim_nlos->add_option("--scene", nlos_opts.scene_file, "Hidden scene JSON")->check(CLI::ExistingFile);
  sim_nlos->add_option("--scenes", nlos_opts.count, "Number of samples")->check(CLI::PositiveNumber);
  sim_nlos->add_option("--grid", grid, "Scan points per side");
  sim_nlos->add_option("--extent", nlos_opts.scan.extent, "Wall extent in metres");
  sim_nlos->add_option("--bins", nlos_opts.scan.bins);
  sim_nlos->add_option("--bin-width-ps", nlos_opts.scan.bin_width_ps);
  sim_nlos->add_option("--pulse-fwhm-ps", nlos_opts.pulse_fwhm_ps);
  sim_nlos->add_option("--sbr", nlos_sbr);
  sim_nlos->add_flag("--quadratic-falloff", nlos_opts.quadratic_falloff, "1/r^4 instead of 1/r^2");
  sim_nlos->add_option("--seed", nlos_opts.seed);
  sim_nlos->add_flag("--deterministic", nlos_det);
  sim_nlos->add_option("--out", nlos_out)->required();

  TrainFlags train_los_flags, train_nlos_flags;
  auto* tr_los = app.add_subcommand("train-los", "Train TRT-LOS");
  train_los_flags.attach(tr_los, Task::los);
  auto* tr_nlos = app.add_subcommand("train-nlos", "Train TRT-NLOS");
  train_nlos_flags.attach(tr_nlos, Task::nlos);

  std::string eval_ckpt, eval_data, eval_report;
  auto* ev_los = app.add_subcommand("eval-los", "Evaluate a LOS checkpoint");
  auto* ev_nlos = app.add_subcommand("eval-nlos", "Evaluate an NLOS checkpoint");
  for (auto* sub : {ev_los, ev_nlos}) {
    sub->add_option("--ckpt", eval_ckpt)->required()->check(CLI::ExistingFile);
    sub->add_option("--data", eval_data)->required()->check(CLI::ExistingDirectory);
    sub->add_option("--report", eval_report, "Report JSON path (stdout if omitted)");
  }

  std::string rec_ckpt, rec_cube, rec_out;
  bool emit_volume = false;
  auto* rec_los = app.add_subcommand("reconstruct-los", "Depth and intensity from a LOS cube");
  auto* rec_nlos = app.add_subcommand("reconstruct-nlos", "Hidden-scene intensity and depth from a confocal cube");
  for (auto* sub : {rec_los, rec_nlos}) {
    sub->add_option("--ckpt", rec_ckpt)->required()->check(CLI::ExistingFile);
    sub->add_option("--cube", rec_cube)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", rec_out, "Output directory")->required();
  }
  rec_nlos->add_flag("--emit-volume", emit_volume, "Also write the reconstructed volume");

  std::string bl_method = "lm", bl_cube, bl_out;
  double bl_fwhm = 400.0;
  auto* baseline = app.add_subcommand("baseline", "Classical per-pixel depth estimators");
  baseline->add_option("--method", bl_method)->check(CLI::IsMember({"lm", "argmax"}));
  baseline->add_option("--cube", bl_cube)->required()->check(CLI::ExistingFile);
  baseline->add_option("--pulse-fwhm-ps", bl_fwhm);
  baseline->add_option("--out", bl_out, "Depth PNG")->required();

  std::string gc_module = "all", gc_report;
  uint64_t gc_seed = 7;
  bool gc_fault = false;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gc->add_option("--module", gc_module)->check(CLI::IsMember(gradcheck_selectors()));
  gc->add_option("--seed", gc_seed);
  gc->add_flag("--inject-fault", gc_fault, "Corrupt one analytic gradient per check");
  gc->add_option("--report", gc_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (sim_los->parsed()) {
    const Size3 s = parse_size(los_size);
    los_opts.height = s.h;
    los_opts.width = s.w;
    los_opts.bins = s.t;
    los_opts.grid = los_sbr == "all" ? standard_sbr_grid() : parse_sbr_list(los_sbr);
    if (los_det) los_opts.threads = 1;
    generate_los_dataset(los_opts, los_out);
    std::printf("wrote %lld LOS samples to %s\n", static_cast<long long>(los_opts.count), los_out.c_str());
  } else if (sim_nlos->parsed()) {
    nlos_opts.scan.height = nlos_opts.scan.width = grid;
    nlos_opts.grid = nlos_sbr == "all" ? standard_sbr_grid() : parse_sbr_list(nlos_sbr);
    if (!nlos_opts.scene_file.empty()) nlos_opts.count = 1;
    generate_nlos_dataset(nlos_opts, nlos_out);
    std::printf("wrote %lld NLOS samples to %s\n", static_cast<long long>(nlos_opts.count), nlos_out.c_str());
  } else if (tr_los->parsed() || tr_nlos->parsed()) {
    const Task task = tr_los->parsed() ? Task::los : Task::nlos;
    TrainConfig cfg = (task == Task::los ? train_los_flags : train_nlos_flags).resolve(task);
    const RunReport r = train(cfg);
    std::printf("trained %zu steps in %.1f s, final loss %.6g, config %s\n", r.step_losses.size(), r.wall_seconds,
                r.step_losses.empty() ? 0.0 : r.step_losses.back(), r.config_hash.c_str());
  } else if (ev_los->parsed() || ev_nlos->parsed()) {
    const Task want = ev_los->parsed() ? Task::los : Task::nlos;
    if (checkpoint_task(eval_ckpt) != want) throw ConfigError("checkpoint task does not match the subcommand");
    const RunReport r = evaluate(eval_ckpt, eval_data);
    if (!eval_report.empty()) print_buckets(r);
    write_text(eval_report, r.to_json());
  } else if (rec_los->parsed()) {
    const auto model = load_los_model(rec_ckpt);
    const LosReconstruction r = reconstruct_los(*model, load_cube(rec_cube));
    fs::create_directories(rec_out);
    save_depth_png(r.depth_m, fs::path(rec_out) / "depth.png");
    save_depth_png(r.filtered_m, fs::path(rec_out) / "depth_filtered.png");
    save_intensity_png(r.intensity, fs::path(rec_out) / "intensity.png");
  } else if (rec_nlos->parsed()) {
    const auto model = load_nlos_model(rec_ckpt);
    const TransientCube cube = load_cube(rec_cube);
    const NlosReconstruction r = reconstruct_nlos(*model, cube);
    fs::create_directories(rec_out);
    save_depth_png(r.depth_m, fs::path(rec_out) / "depth.png");
    save_intensity_png(r.intensity, fs::path(rec_out) / "intensity.png");
    if (emit_volume) {
      const double bin_ps = cube.bin_width_ps() * model->config().extract_down;
      const fs::path vol = fs::path(rec_out) / "volume.trtc";
      Tensor clamped = r.volume;
      for (double& v : clamped.values()) v = std::max(v, 0.0);
      save_cube(TransientCube(clamped, bin_ps, CubeKind::rates), vol);
      nlohmann::json note{{"axes", {"y", "x", "depth"}},
                          {"depth_bin_meters", model->config().volume_bin_meters()},
                          {"wall_extent", model->config().wall_extent},
                          {"clamped_negative", true},
                          {"note", "last axis is hidden-scene depth; bin_width_ps encodes its round-trip time"}};
      write_text((fs::path(rec_out) / "volume.json").string(), note.dump(2));
    }
  } else if (baseline->parsed()) {
    const TransientCube cube = load_cube(bl_cube);
    const DepthMap depth = bl_method == "lm"
                               ? log_matched_filter(cube, PulseModel::gaussian(bl_fwhm, cube.bin_width_ps()))
                               : raw_argmax(cube);
    save_depth_png(depth, bl_out);
  } else if (gc->parsed()) {
    const GradcheckReport r = run_gradcheck_suite(gc_module, gc_seed, gc_fault ? 0.5 : 0.0);
    for (const GradcheckEntry& e : r.entries) {
      std::printf("%-4s %-10s %-28s max_rel=%.3e (%lld probes)\n", e.result.passed ? "ok" : "FAIL", e.module.c_str(),
                  e.name.c_str(), e.result.max_rel_error, static_cast<long long>(e.result.checked));
    }
    std::printf("%s in %.1f s\n", r.passed() ? "passed" : "FAILED", r.seconds);
    if (!gc_report.empty()) write_text(gc_report, r.to_json());
    return r.passed() ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
}
