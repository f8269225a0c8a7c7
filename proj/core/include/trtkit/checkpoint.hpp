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

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "trtkit/params.hpp"

namespace trtkit {

/// Parsed checkpoint container.
struct CheckpointData {
  /// JSON text of the model configuration.
  std::string model_json;
  /// Free-form JSON metadata (epoch, task, config hash, ...).
  std::string meta_json;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

/// Container layout (little-endian): magic "TRTK", u32 version = 1,
/// u64 header length, JSON header {model, meta, tensors: [{name, shape,
/// offset}]}, then the tensors as row-major f32 in header order. Offsets
/// count floats from the start of the payload.
void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params, const std::string& model_json,
                     const std::string& meta_json = "{}");
CheckpointData load_checkpoint(const std::filesystem::path& path);

/// Copies tensors into `params`; names and shapes must match exactly.
void restore_parameters(const CheckpointData& data, ParameterSet& params);

}  // namespace trtkit
