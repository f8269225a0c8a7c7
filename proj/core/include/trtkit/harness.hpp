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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "trtkit/dataset.hpp"
#include "trtkit/optimizer.hpp"
#include "trtkit/trt_los.hpp"
#include "trtkit/trt_nlos.hpp"

namespace trtkit {

enum class Task { los, nlos };

const char* task_name(Task t);

struct TrainConfig {
  Task task = Task::los;
  AdamWOptions optimizer;
  /// Learning-rate multiplier applied after every epoch.
  double lr_decay = 1.0;
  int epochs = 1;
  int batch_size = 4;
  /// Stop after this many optimizer steps; 0 runs every epoch in full.
  int64_t max_steps = 0;
  uint64_t seed = 0;
  bool deterministic = true;
  int threads = 1;
  LosModelConfig los;
  NlosModelConfig nlos;
  std::string data_dir;
  std::string checkpoint_path;
  std::string report_path;

  /// Defaults for a task: NLOS uses an exponential decay of 0.95 per epoch.
  static TrainConfig defaults(Task task);
  void validate() const;
};

// JSON round trips. Parsing starts from `base` and overrides present keys.
std::string to_json(const AttentionConfig& c);
std::string to_json(const LosModelConfig& c);
std::string to_json(const NlosModelConfig& c);
std::string to_json(const TrainConfig& c);
LosModelConfig los_config_from_json(const std::string& text, const LosModelConfig& base = {});
NlosModelConfig nlos_config_from_json(const std::string& text, const NlosModelConfig& base = {});
TrainConfig train_config_from_json(const std::string& text, const TrainConfig& base = {});

/// FNV-1a of the canonical configuration JSON, excluding file paths and the
/// thread count.
std::string config_hash(const TrainConfig& c);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  int64_t steps = 0;
  double seconds = 0.0;
};

struct BucketMetrics {
  std::string label;
  int64_t samples = 0;
  double rmse_bins = 0.0, rmse_m = 0.0;
  double mad_bins = 0.0, mad_m = 0.0;
  bool has_intensity = false;
  double psnr = 0.0, ssim = 0.0;
};

struct RunReport {
  std::string task;
  uint64_t seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;
  std::vector<EpochRecord> epochs;
  std::vector<double> step_losses;
  /// Per SBR label, in order of first appearance.
  std::vector<BucketMetrics> buckets;
  /// Unweighted means of the label buckets sharing a background level.
  std::vector<BucketMetrics> groups;

  std::string to_json() const;
};

/// Called after every optimizer step; returning false stops training.
using StepCallback = std::function<bool(int64_t step, double loss)>;

/// Mini-batch training with gradient accumulation. Parameters are rounded
/// to float after each update so float checkpoints reproduce them exactly.
/// A non-finite loss aborts with NumericalError naming the batch.
RunReport train_los(TrtLos& model, const std::vector<LosSample>& data, const TrainConfig& cfg,
                    const StepCallback& on_step = {});
RunReport train_nlos(TrtNlos& model, const std::vector<NlosSample>& data, const TrainConfig& cfg,
                     const StepCallback& on_step = {});

RunReport evaluate_los(const TrtLos& model, const std::vector<LosSample>& data);
RunReport evaluate_nlos(const TrtNlos& model, const std::vector<NlosSample>& data);

/// Groups per-sample metrics by label and background level.
void summarize(const std::vector<std::pair<SbrLevel, BucketMetrics>>& per_sample, RunReport& report);

struct LosReconstruction {
  DepthMap depth_bins;   // soft-argmax readout
  DepthMap depth_m;
  IntensityImage intensity;  // per-pixel photon totals
  DepthMap filtered_m;   // depth with low-reflectivity pixels masked
  Tensor histogram;      // (H, W, T)
};
LosReconstruction reconstruct_los(const TrtLos& model, const TransientCube& cube);

struct NlosReconstruction {
  Tensor volume;  // (N, N, Z)
  Tensor denoised;
  IntensityImage intensity;
  DepthMap depth_bins;  // volume bins
  DepthMap depth_m;
};
NlosReconstruction reconstruct_nlos(const TrtNlos& model, const TransientCube& cube);

// Checkpoints carry the model configuration and task in their header.
void save_model(const std::filesystem::path& path, const TrtLos& model, const std::string& meta_json = "{}");
void save_model(const std::filesystem::path& path, const TrtNlos& model, const std::string& meta_json = "{}");
Task checkpoint_task(const std::filesystem::path& path);
std::unique_ptr<TrtLos> load_los_model(const std::filesystem::path& path);
std::unique_ptr<TrtNlos> load_nlos_model(const std::filesystem::path& path);

/// File-driven training: loads the dataset in cfg.data_dir, writes a
/// checkpoint per epoch to cfg.checkpoint_path and the report to
/// cfg.report_path when set.
RunReport train(const TrainConfig& cfg);
RunReport evaluate(const std::filesystem::path& checkpoint, const std::filesystem::path& data_dir);

}  // namespace trtkit
