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

#include "trtkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <random>

#include "trtkit/checkpoint.hpp"
#include "trtkit/error.hpp"
#include "trtkit/metrics.hpp"
#include "trtkit/ops.hpp"
#include "trtkit/rng.hpp"

namespace trtkit {

using nlohmann::json;
namespace fs = std::filesystem;

const char* task_name(Task t) { return t == Task::los ? "los" : "nlos"; }

namespace {

Task parse_task(const std::string& s) {
  if (s == "los") return Task::los;
  if (s == "nlos") return Task::nlos;
  throw ConfigError("unknown task " + s);
}

json attention_to(const AttentionConfig& c) {
  return {{"channels", c.channels},
          {"heads", c.heads},
          {"window_spatial", c.window_spatial},
          {"window_temporal", c.window_temporal},
          {"global_downsample", c.global_downsample},
          {"stca_heads", c.stca_heads},
          {"blocks", c.blocks},
          {"spatial_attention", c.spatial_attention},
          {"temporal_attention", c.temporal_attention},
          {"integration", integration_name(c.integration)}};
}

AttentionConfig attention_from(const json& j, AttentionConfig c) {
  c.channels = j.value("channels", c.channels);
  c.heads = j.value("heads", c.heads);
  c.window_spatial = j.value("window_spatial", c.window_spatial);
  c.window_temporal = j.value("window_temporal", c.window_temporal);
  c.global_downsample = j.value("global_downsample", c.global_downsample);
  c.stca_heads = j.value("stca_heads", c.stca_heads);
  c.blocks = j.value("blocks", c.blocks);
  c.spatial_attention = j.value("spatial_attention", c.spatial_attention);
  c.temporal_attention = j.value("temporal_attention", c.temporal_attention);
  if (j.contains("integration")) c.integration = parse_integration(j.at("integration").get<std::string>());
  return c;
}

json los_to(const LosModelConfig& c) {
  return {{"attention", attention_to(c.attention)},
          {"gamma", c.gamma},
          {"temperature", c.temperature},
          {"leaky_slope", c.leaky_slope},
          {"spatial_down", c.spatial_down},
          {"temporal_down", c.temporal_down},
          {"temporal_pool", c.temporal_pool},
          {"temporal_shuffle", c.temporal_shuffle},
          {"zero_init_extractor_tail", c.zero_init_extractor_tail}};
}

LosModelConfig los_from(const json& j, LosModelConfig c) {
  if (j.contains("attention")) c.attention = attention_from(j.at("attention"), c.attention);
  c.gamma = j.value("gamma", c.gamma);
  c.temperature = j.value("temperature", c.temperature);
  c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
  c.spatial_down = j.value("spatial_down", c.spatial_down);
  c.temporal_down = j.value("temporal_down", c.temporal_down);
  c.temporal_pool = j.value("temporal_pool", c.temporal_pool);
  c.temporal_shuffle = j.value("temporal_shuffle", c.temporal_shuffle);
  c.zero_init_extractor_tail = j.value("zero_init_extractor_tail", c.zero_init_extractor_tail);
  return c;
}

json nlos_to(const NlosModelConfig& c) {
  return {{"attention", attention_to(c.attention)},
          {"grid", c.grid},
          {"bins", c.bins},
          {"bin_width_ps", c.bin_width_ps},
          {"wall_extent", c.wall_extent},
          {"use_denoiser", c.use_denoiser},
          {"denoiser_channels", c.denoiser_channels},
          {"extract_down", c.extract_down},
          {"enhance_down", c.enhance_down},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"temperature", c.temperature},
          {"leaky_slope", c.leaky_slope}};
}

NlosModelConfig nlos_from(const json& j, NlosModelConfig c) {
  if (j.contains("attention")) c.attention = attention_from(j.at("attention"), c.attention);
  c.grid = j.value("grid", c.grid);
  c.bins = j.value("bins", c.bins);
  c.bin_width_ps = j.value("bin_width_ps", c.bin_width_ps);
  c.wall_extent = j.value("wall_extent", c.wall_extent);
  c.use_denoiser = j.value("use_denoiser", c.use_denoiser);
  c.denoiser_channels = j.value("denoiser_channels", c.denoiser_channels);
  c.extract_down = j.value("extract_down", c.extract_down);
  c.enhance_down = j.value("enhance_down", c.enhance_down);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.temperature = j.value("temperature", c.temperature);
  c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
  return c;
}

json train_to(const TrainConfig& c) {
  return {{"task", task_name(c.task)},
          {"optimizer",
           {{"lr", c.optimizer.lr},
            {"beta1", c.optimizer.beta1},
            {"beta2", c.optimizer.beta2},
            {"eps", c.optimizer.eps},
            {"weight_decay", c.optimizer.weight_decay},
            {"clip_norm", c.optimizer.clip_norm}}},
          {"lr_decay", c.lr_decay},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"max_steps", c.max_steps},
          {"seed", c.seed},
          {"deterministic", c.deterministic},
          {"threads", c.threads},
          {"los", los_to(c.los)},
          {"nlos", nlos_to(c.nlos)},
          {"data_dir", c.data_dir},
          {"checkpoint_path", c.checkpoint_path},
          {"report_path", c.report_path}};
}

template <typename F>
auto parse_json(const std::string& text, F f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration JSON: ") + e.what());
  }
}

}  // namespace

TrainConfig TrainConfig::defaults(Task task) {
  TrainConfig c;
  c.task = task;
  if (task == Task::nlos) c.lr_decay = 0.95;
  return c;
}

void TrainConfig::validate() const {
  if (!(optimizer.lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(lr_decay > 0.0)) throw ConfigError("lr decay must be positive");
  if (max_steps < 0) throw ConfigError("max steps must be >= 0");
  if (task == Task::los) los.validate();
  else nlos.validate();
}

std::string to_json(const AttentionConfig& c) { return attention_to(c).dump(); }
std::string to_json(const LosModelConfig& c) { return los_to(c).dump(); }
std::string to_json(const NlosModelConfig& c) { return nlos_to(c).dump(); }
std::string to_json(const TrainConfig& c) { return train_to(c).dump(2); }

LosModelConfig los_config_from_json(const std::string& text, const LosModelConfig& base) {
  return parse_json(text, [&](const json& j) { return los_from(j, base); });
}

NlosModelConfig nlos_config_from_json(const std::string& text, const NlosModelConfig& base) {
  return parse_json(text, [&](const json& j) { return nlos_from(j, base); });
}

TrainConfig train_config_from_json(const std::string& text, const TrainConfig& base) {
  return parse_json(text, [&](const json& j) {
    TrainConfig c = base;
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      c.optimizer.lr = o.value("lr", c.optimizer.lr);
      c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
      c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
      c.optimizer.eps = o.value("eps", c.optimizer.eps);
      c.optimizer.weight_decay = o.value("weight_decay", c.optimizer.weight_decay);
      c.optimizer.clip_norm = o.value("clip_norm", c.optimizer.clip_norm);
    }
    c.lr_decay = j.value("lr_decay", c.lr_decay);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.seed = j.value("seed", c.seed);
    c.deterministic = j.value("deterministic", c.deterministic);
    c.threads = j.value("threads", c.threads);
    if (j.contains("los")) c.los = los_from(j.at("los"), c.los);
    if (j.contains("nlos")) c.nlos = nlos_from(j.at("nlos"), c.nlos);
    c.data_dir = j.value("data_dir", c.data_dir);
    c.checkpoint_path = j.value("checkpoint_path", c.checkpoint_path);
    c.report_path = j.value("report_path", c.report_path);
    return c;
  });
}

std::string config_hash(const TrainConfig& c) {
  json j = train_to(c);
  for (const char* k : {"data_dir", "checkpoint_path", "report_path", "threads"}) j.erase(k);
  const std::string text = j.dump();  // object keys are sorted
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunReport::to_json() const {
  auto bucket = [](const BucketMetrics& b) {
    json j{{"label", b.label},     {"samples", b.samples}, {"rmse_bins", b.rmse_bins},
           {"rmse_m", b.rmse_m},   {"mad_bins", b.mad_bins}, {"mad_m", b.mad_m}};
    if (b.has_intensity) {
      j["psnr_db"] = b.psnr;
      j["ssim"] = b.ssim;
    }
    return j;
  };
  json j{{"task", task}, {"seed", seed}, {"config_hash", config_hash}, {"wall_seconds", wall_seconds}};
  j["epochs"] = json::array();
  for (const EpochRecord& e : epochs)
    j["epochs"].push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"steps", e.steps}, {"seconds", e.seconds}});
  j["step_losses"] = step_losses;
  j["buckets"] = json::array();
  for (const auto& b : buckets) j["buckets"].push_back(bucket(b));
  j["groups"] = json::array();
  for (const auto& g : groups) j["groups"].push_back(bucket(g));
  return j.dump(2);
}

namespace {

struct PreparedLos {
  Tensor input;
  Tensor target;
};

struct PreparedNlos {
  Tensor input;
  Tensor measurement;
  Tensor intensity;
  Tensor depth;
  Tensor mask;
};

PreparedLos prepare(const LosSample& s, const LosModelConfig&) {
  const PulseModel pulse = PulseModel::gaussian(s.pulse_fwhm_ps, s.cube.bin_width_ps());
  return {normalize_input(s.cube.to_tensor()),
          los_target_histogram(s.depth, pulse, s.cube.bins(), s.cube.bin_width_ps())};
}

double cube_peak(const TransientCube& cube) {
  double peak = 0.0;
  for (double v : cube.values()) peak = std::max(peak, v);
  return peak > 0.0 ? peak : 1.0;
}

PreparedNlos prepare(const NlosSample& s, const NlosModelConfig& cfg) {
  PreparedNlos p;
  const double scale_factor = 1.0 / cube_peak(s.cube);
  p.input = s.cube.to_tensor();
  p.input *= scale_factor;
  p.measurement = s.clean.to_tensor();
  p.measurement *= scale_factor;
  p.intensity = s.intensity.to_tensor();
  DepthMap bins = s.depth;
  for (double& v : bins.values) v /= cfg.volume_bin_meters();
  p.depth = bins.to_tensor();
  p.mask = s.depth.mask_tensor();
  return p;
}

template <typename Sample, typename Prepared, typename StepLoss>
RunReport train_loop(ParameterSet& params, const std::vector<Sample>& data, const TrainConfig& cfg,
                     const StepCallback& on_step, const std::function<void(int epoch)>& on_epoch, StepLoss step_loss) {
  if (data.empty()) throw ConfigError("training set is empty");
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.task = task_name(cfg.task);
  report.seed = cfg.seed;
  report.config_hash = config_hash(cfg);
  AdamW opt(params, cfg.optimizer);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  int64_t step = 0;
  bool stop = false;
  for (int epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(stream_key(cfg.seed, 0xE90C, static_cast<uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int64_t epoch_steps = 0;
    for (size_t first = 0; first < order.size() && !stop; first += static_cast<size_t>(cfg.batch_size)) {
      const size_t last = std::min(order.size(), first + static_cast<size_t>(cfg.batch_size));
      const double weight = 1.0 / static_cast<double>(last - first);
      double batch_loss = 0.0;
      for (size_t k = first; k < last; ++k) {
        Var loss;
        try {
          loss = step_loss(order[k]);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string(e.what()) + " at batch " + std::to_string(step) + " (epoch " +
                               std::to_string(epoch) + ", sample " + std::to_string(order[k]) + ")");
        }
        const double v = loss.value()[0];
        if (!std::isfinite(v)) {
          std::string ids;
          for (size_t q = first; q < last; ++q) ids += (ids.empty() ? "" : ",") + std::to_string(order[q]);
          throw NumericalError("non-finite loss at batch " + std::to_string(step) + " (epoch " + std::to_string(epoch) +
                               ", samples " + ids + ")");
        }
        batch_loss += v * weight;
        backward(scale(loss, weight));
      }
      opt.step();
      params.round_to_float();
      report.step_losses.push_back(batch_loss);
      epoch_loss += batch_loss;
      ++epoch_steps;
      ++step;
      if (on_step && !on_step(step, batch_loss)) stop = true;
      if (cfg.max_steps > 0 && step >= cfg.max_steps) stop = true;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    report.epochs.push_back({epoch, epoch_loss / static_cast<double>(std::max<int64_t>(1, epoch_steps)), epoch_steps, secs});
    if (on_epoch) on_epoch(epoch);
    opt.set_lr(opt.lr() * cfg.lr_decay);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

RunReport train_los(TrtLos& model, const std::vector<LosSample>& data, const TrainConfig& cfg, const StepCallback& on_step) {
  cfg.validate();
  std::vector<PreparedLos> prepared;
  for (const LosSample& s : data) prepared.push_back(prepare(s, model.config()));
  auto step_loss = [&](size_t i) {
    const LosOutput out = model.forward(prepared[i].input);
    return los_total_loss(out.histogram, prepared[i].target, out.depth, model.config().gamma).total;
  };
  std::function<void(int)> on_epoch;
  if (!cfg.checkpoint_path.empty()) {
    on_epoch = [&](int epoch) {
      save_model(cfg.checkpoint_path, model, json{{"epoch", epoch}, {"config_hash", config_hash(cfg)}}.dump());
    };
  }
  return train_loop<LosSample, PreparedLos>(model.params(), data, cfg, on_step, on_epoch, step_loss);
}

RunReport train_nlos(TrtNlos& model, const std::vector<NlosSample>& data, const TrainConfig& cfg,
                     const StepCallback& on_step) {
  cfg.validate();
  const NlosModelConfig& mc = model.config();
  std::vector<PreparedNlos> prepared;
  for (const NlosSample& s : data) prepared.push_back(prepare(s, mc));
  auto step_loss = [&](size_t i) {
    const PreparedNlos& p = prepared[i];
    const NlosOutput out = model.forward(p.input);
    return nlos_losses(out.denoised, p.measurement, out.intensity, p.intensity, out.soft_depth, p.depth, p.mask,
                       mc.alpha, mc.beta)
        .total;
  };
  std::function<void(int)> on_epoch;
  if (!cfg.checkpoint_path.empty()) {
    on_epoch = [&](int epoch) {
      save_model(cfg.checkpoint_path, model, json{{"epoch", epoch}, {"config_hash", config_hash(cfg)}}.dump());
    };
  }
  return train_loop<NlosSample, PreparedNlos>(model.params(), data, cfg, on_step, on_epoch, step_loss);
}

void summarize(const std::vector<std::pair<SbrLevel, BucketMetrics>>& per_sample, RunReport& report) {
  report.buckets.clear();
  report.groups.clear();
  std::vector<SbrLevel> levels;
  for (const auto& [sbr, m] : per_sample) {
    auto it = std::find_if(report.buckets.begin(), report.buckets.end(),
                           [&](const BucketMetrics& b) { return b.label == sbr.label(); });
    if (it == report.buckets.end()) {
      BucketMetrics b;
      b.label = sbr.label();
      b.has_intensity = m.has_intensity;
      report.buckets.push_back(b);
      levels.push_back(sbr);
      it = report.buckets.end() - 1;
    }
    it->samples += 1;
    it->rmse_bins += m.rmse_bins;
    it->rmse_m += m.rmse_m;
    it->mad_bins += m.mad_bins;
    it->mad_m += m.mad_m;
    it->psnr += m.psnr;
    it->ssim += m.ssim;
  }
  for (BucketMetrics& b : report.buckets) {
    const double n = static_cast<double>(b.samples);
    b.rmse_bins /= n;
    b.rmse_m /= n;
    b.mad_bins /= n;
    b.mad_m /= n;
    b.psnr /= n;
    b.ssim /= n;
  }
  std::vector<std::string> group_order;
  std::map<std::string, std::vector<const BucketMetrics*>> members;
  for (size_t i = 0; i < levels.size(); ++i) {
    const std::string g = levels[i].group();
    if (!members.count(g)) group_order.push_back(g);
    members[g].push_back(&report.buckets[i]);
  }
  for (const std::string& g : group_order) {
    BucketMetrics avg;
    avg.label = g;
    const auto& list = members[g];
    const double n = static_cast<double>(list.size());
    for (const BucketMetrics* b : list) {
      avg.samples += b->samples;
      avg.has_intensity = b->has_intensity;
      avg.rmse_bins += b->rmse_bins / n;
      avg.rmse_m += b->rmse_m / n;
      avg.mad_bins += b->mad_bins / n;
      avg.mad_m += b->mad_m / n;
      avg.psnr += b->psnr / n;
      avg.ssim += b->ssim / n;
    }
    report.groups.push_back(avg);
  }
}

LosReconstruction reconstruct_los(const TrtLos& model, const TransientCube& cube) {
  NoGradGuard guard;
  const LosOutput out = model.forward(normalize_input(cube.to_tensor()));
  LosReconstruction r;
  r.histogram = out.histogram.value();
  r.depth_bins = DepthMap(cube.height(), cube.width(), DepthUnits::bins);
  r.depth_bins.values.assign(out.depth.value().values().begin(), out.depth.value().values().end());
  r.depth_m = depth_to_meters(r.depth_bins, cube.bin_width_ps());
  r.intensity = intensity_from_counts(cube);
  r.filtered_m = reflectivity_threshold_filter(r.depth_m, r.intensity);
  return r;
}

NlosReconstruction reconstruct_nlos(const TrtNlos& model, const TransientCube& cube) {
  NoGradGuard guard;
  Tensor input = cube.to_tensor();
  input *= 1.0 / cube_peak(cube);
  const NlosOutput out = model.forward(input);
  NlosReconstruction r;
  r.volume = out.volume.value();
  r.denoised = out.denoised.value();
  const int64_t n = model.config().grid;
  r.intensity = IntensityImage(n, n);
  r.depth_bins = DepthMap(n, n, DepthUnits::bins);
  for (int64_t i = 0; i < n * n; ++i) {
    r.intensity.values[static_cast<size_t>(i)] = std::max(0.0, out.intensity.value()[i]);
    r.depth_bins.values[static_cast<size_t>(i)] = out.depth[i];
  }
  r.depth_m = r.depth_bins;
  r.depth_m.units = DepthUnits::meters;
  for (double& v : r.depth_m.values) v *= model.config().volume_bin_meters();
  return r;
}

RunReport evaluate_los(const TrtLos& model, const std::vector<LosSample>& data) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<SbrLevel, BucketMetrics>> rows;
  for (const LosSample& s : data) {
    const LosReconstruction r = reconstruct_los(model, s.cube);
    const DepthMap gt_bins = depth_to_bins(s.depth, s.cube.bin_width_ps());
    BucketMetrics m;
    m.rmse_bins = rmse(r.depth_bins, gt_bins);
    m.mad_bins = mad(r.depth_bins, gt_bins);
    m.rmse_m = rmse(r.depth_m, s.depth);
    m.mad_m = mad(r.depth_m, s.depth);
    rows.emplace_back(s.sbr, m);
  }
  RunReport report;
  report.task = "los";
  summarize(rows, report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

RunReport evaluate_nlos(const TrtNlos& model, const std::vector<NlosSample>& data) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<SbrLevel, BucketMetrics>> rows;
  for (const NlosSample& s : data) {
    const NlosReconstruction r = reconstruct_nlos(model, s.cube);
    DepthMap gt_bins = s.depth;
    gt_bins.units = DepthUnits::bins;
    for (double& v : gt_bins.values) v /= model.config().volume_bin_meters();
    BucketMetrics m;
    m.rmse_bins = rmse(r.depth_bins, gt_bins);
    m.mad_bins = mad(r.depth_bins, gt_bins);
    m.rmse_m = rmse(r.depth_m, s.depth);
    m.mad_m = mad(r.depth_m, s.depth);
    const CropResult c = crop_to_gt(r.intensity, s.intensity);
    SsimOptions so;
    const bool fits = c.pred.height >= so.window && c.pred.width >= so.window;
    m.has_intensity = true;
    m.psnr = psnr(c.pred, c.gt, 1.0);
    if (fits) {
      m.ssim = ssim(c.pred, c.gt, 1.0, so);
    } else {
      // Grids smaller than the window fall back to the largest odd window that fits.
      const int64_t side = std::min<int64_t>(so.window, std::min(r.intensity.height, r.intensity.width));
      so.window = static_cast<int>(side % 2 == 0 ? side - 1 : side);
      m.ssim = ssim(r.intensity, s.intensity, 1.0, so);
    }
    rows.emplace_back(s.sbr, m);
  }
  RunReport report;
  report.task = "nlos";
  summarize(rows, report);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

std::string with_task(const std::string& meta_json, Task task) {
  json meta = json::parse(meta_json);
  meta["task"] = task_name(task);
  return meta.dump();
}

}  // namespace

void save_model(const fs::path& path, const TrtLos& model, const std::string& meta_json) {
  save_checkpoint(path, model.params(), to_json(model.config()), with_task(meta_json, Task::los));
}

void save_model(const fs::path& path, const TrtNlos& model, const std::string& meta_json) {
  save_checkpoint(path, model.params(), to_json(model.config()), with_task(meta_json, Task::nlos));
}

Task checkpoint_task(const fs::path& path) {
  const CheckpointData data = load_checkpoint(path);
  return parse_task(json::parse(data.meta_json).value("task", std::string("los")));
}

std::unique_ptr<TrtLos> load_los_model(const fs::path& path) {
  const CheckpointData data = load_checkpoint(path);
  if (json::parse(data.meta_json).value("task", std::string("los")) != "los") {
    throw ConfigError(path.string() + " is not a LOS checkpoint");
  }
  auto model = std::make_unique<TrtLos>(los_config_from_json(data.model_json), 0);
  restore_parameters(data, model->params());
  return model;
}

std::unique_ptr<TrtNlos> load_nlos_model(const fs::path& path) {
  const CheckpointData data = load_checkpoint(path);
  if (json::parse(data.meta_json).value("task", std::string("los")) != "nlos") {
    throw ConfigError(path.string() + " is not an NLOS checkpoint");
  }
  auto model = std::make_unique<TrtNlos>(nlos_config_from_json(data.model_json), 0);
  restore_parameters(data, model->params());
  return model;
}

namespace {

void write_report(const RunReport& report, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report " + path);
  out << report.to_json() << '\n';
}

}  // namespace

RunReport train(const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.data_dir.empty()) throw ConfigError("training needs a data directory");
  RunReport report;
  if (cfg.task == Task::los) {
    const auto data = load_los_dataset(cfg.data_dir);
    TrtLos model(cfg.los, cfg.seed);
    model.params().round_to_float();
    report = train_los(model, data, cfg);
  } else {
    const auto data = load_nlos_dataset(cfg.data_dir);
    TrainConfig run = cfg;
    if (!data.empty()) {
      run.nlos.grid = data.front().cube.height();
      run.nlos.bins = data.front().cube.bins();
      run.nlos.bin_width_ps = data.front().cube.bin_width_ps();
      run.nlos.wall_extent = data.front().wall_extent;
    }
    run.validate();
    TrtNlos model(run.nlos, run.seed);
    model.params().round_to_float();
    report = train_nlos(model, data, run);
  }
  write_report(report, cfg.report_path);
  return report;
}

RunReport evaluate(const fs::path& checkpoint, const fs::path& data_dir) {
  if (checkpoint_task(checkpoint) == Task::los) {
    const auto model = load_los_model(checkpoint);
    return evaluate_los(*model, load_los_dataset(data_dir));
  }
  const auto model = load_nlos_model(checkpoint);
  return evaluate_nlos(*model, load_nlos_dataset(data_dir));
}

}  // namespace trtkit
