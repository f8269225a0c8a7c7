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

#include "trtkit/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "trtkit/error.hpp"
#include "trtkit/image_io.hpp"
#include "trtkit/rng.hpp"
#include "trtkit/scene_gen.hpp"

namespace trtkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string indexed(const char* stem, int64_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04lld%s", stem, static_cast<long long>(i), ext);
  return buf;
}

json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("missing manifest.json in " + dir.string());
  try {
    json j;
    in >> j;
    if (!j.is_array()) throw FormatError("manifest must be a JSON array");
    return j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad manifest: ") + e.what());
  }
}

void write_manifest(const fs::path& dir, const json& j) {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

std::vector<fs::path> depth_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no PNG depth images in " + dir.string());
  return files;
}

}  // namespace

std::string SbrLevel::label() const { return format_number(signal) + ":" + format_number(background); }

std::string SbrLevel::group() const {
  return std::string(background >= 100.0 ? "Y:" : "X:") + format_number(background);
}

SbrLevel parse_sbr(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("SBR must look like signal:background, got '" + text + "'");
  try {
    size_t used = 0;
    SbrLevel s;
    s.signal = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw ConfigError("bad SBR '" + text + "'");
    const std::string rest = text.substr(colon + 1);
    s.background = std::stod(rest, &used);
    if (used != rest.size()) throw ConfigError("bad SBR '" + text + "'");
    if (!(s.signal >= 0.0) || !(s.background >= 0.0)) throw ConfigError("SBR budgets must be >= 0");
    return s;
  } catch (const std::logic_error&) {
    throw ConfigError("bad SBR '" + text + "'");
  }
}

std::vector<SbrLevel> parse_sbr_list(const std::string& text) {
  std::vector<SbrLevel> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_sbr(item));
  if (out.empty()) throw ConfigError("empty SBR list");
  return out;
}

std::vector<SbrLevel> standard_sbr_grid() {
  std::vector<SbrLevel> g;
  for (double b : {2.0, 10.0, 50.0})
    for (double s : {10.0, 5.0, 2.0}) g.push_back({s, b});
  for (double s : {3.0, 2.0, 1.0}) g.push_back({s, 100.0});
  return g;
}

LosSample simulate_los_sample(const LosDatasetOptions& o, int64_t index) {
  if (o.grid.empty()) throw ConfigError("empty SBR grid");
  SceneLOS scene;
  if (!o.import_dir.empty()) {
    const auto files = depth_images(o.import_dir);
    scene = scene_from_depth(load_depth_png(files[static_cast<size_t>(index) % files.size()]));
    if (scene.height != o.height || scene.width != o.width) throw ShapeError("imported depth image size mismatch");
  } else {
    scene = procedural_scene(scene_options_for(o.height, o.width, o.bins, o.bin_width_ps),
                             stream_key(o.seed, static_cast<uint64_t>(index), 1));
  }
  const PulseModel pulse = PulseModel::gaussian(o.pulse_fwhm_ps, o.bin_width_ps, o.jitter_fwhm_ps);
  const TransientCube rates = ideal_transient(scene, pulse, o.bins, o.bin_width_ps);
  LosSample s;
  s.sbr = o.grid[static_cast<size_t>(index) % o.grid.size()];
  s.seed = stream_key(o.seed, static_cast<uint64_t>(index), 2);
  s.pulse_fwhm_ps = o.pulse_fwhm_ps;
  const DetectionModel det = calibrate_sbr(rates, DetectionModel{}, s.sbr.signal, s.sbr.background, scene.valid);
  s.cube = poisson_detect(rates, det, s.seed, o.threads);
  s.depth = scene.depth_map();
  return s;
}

void generate_los_dataset(const LosDatasetOptions& o, const fs::path& out_dir) {
  if (o.count < 1) throw ConfigError("dataset count must be >= 1");
  fs::create_directories(out_dir);
  json manifest = json::array();
  for (int64_t i = 0; i < o.count; ++i) {
    const LosSample s = simulate_los_sample(o, i);
    const std::string cube_name = indexed("cube", i, ".trtc");
    const std::string depth_name = indexed("depth", i, ".png");
    save_cube(s.cube, out_dir / cube_name);
    save_depth_png(s.depth, out_dir / depth_name);
    manifest.push_back({{"cube_path", cube_name},
                        {"gt_depth_path", depth_name},
                        {"signal", s.sbr.signal},
                        {"background", s.sbr.background},
                        {"seed", s.seed},
                        {"label", s.sbr.label()},
                        {"pulse_fwhm_ps", s.pulse_fwhm_ps}});
  }
  write_manifest(out_dir, manifest);
}

std::vector<LosSample> load_los_dataset(const fs::path& dir) {
  std::vector<LosSample> out;
  for (const auto& e : read_manifest(dir)) {
    try {
      LosSample s;
      s.cube = load_cube(dir / e.at("cube_path").get<std::string>());
      s.depth = load_depth_png(dir / e.at("gt_depth_path").get<std::string>());
      s.sbr = {e.at("signal").get<double>(), e.at("background").get<double>()};
      s.seed = e.at("seed").get<uint64_t>();
      s.pulse_fwhm_ps = e.value("pulse_fwhm_ps", 400.0);
      out.push_back(std::move(s));
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad manifest entry: ") + ex.what());
    }
  }
  return out;
}

NlosSample simulate_nlos_sample(const NlosDatasetOptions& o, int64_t index) {
  if (o.grid.empty()) throw ConfigError("empty SBR grid");
  const HiddenScene scene = o.scene_file.empty()
                                ? procedural_hidden_scene(o.scan, o.scene, stream_key(o.seed, static_cast<uint64_t>(index), 1))
                                : load_hidden_scene(o.scene_file);
  const PulseModel pulse = PulseModel::gaussian(o.pulse_fwhm_ps, o.scan.bin_width_ps);
  const TransientCube rates = render_confocal(scene, o.scan, pulse, {o.quadratic_falloff});
  NlosSample s;
  s.sbr = o.grid[static_cast<size_t>(index) % o.grid.size()];
  s.seed = stream_key(o.seed, static_cast<uint64_t>(index), 2);
  s.wall_extent = o.scan.extent;
  const DetectionModel det = calibrate_sbr(rates, DetectionModel{}, s.sbr.signal, s.sbr.background);
  s.cube = poisson_detect(rates, det, s.seed);
  s.clean = TransientCube(rates.height(), rates.width(), rates.bins(), rates.bin_width_ps(), CubeKind::rates);
  const double gain = static_cast<double>(det.cycles) * det.efficiency;
  for (int64_t p = 0; p < rates.pixels(); ++p) {
    const auto src = rates.histogram(p / rates.width(), p % rates.width());
    auto dst = s.clean.histogram(p / rates.width(), p % rates.width());
    for (size_t n = 0; n < src.size(); ++n) dst[n] = gain * det.attenuation_at(p) * src[n];
  }
  std::tie(s.intensity, s.depth) = gt_views(scene, o.scan);
  return s;
}

void generate_nlos_dataset(const NlosDatasetOptions& o, const fs::path& out_dir) {
  if (o.count < 1) throw ConfigError("dataset count must be >= 1");
  fs::create_directories(out_dir);
  json manifest = json::array();
  for (int64_t i = 0; i < o.count; ++i) {
    const NlosSample s = simulate_nlos_sample(o, i);
    const std::string cube_name = indexed("cube", i, ".trtc");
    const std::string clean_name = indexed("clean", i, ".trtc");
    const std::string intensity_name = indexed("intensity", i, ".png");
    const std::string depth_name = indexed("depth", i, ".png");
    save_cube(s.cube, out_dir / cube_name);
    save_cube(s.clean, out_dir / clean_name);
    save_intensity_png(s.intensity, out_dir / intensity_name);
    save_depth_png(s.depth, out_dir / depth_name);
    manifest.push_back({{"cube_path", cube_name},
                        {"clean_path", clean_name},
                        {"intensity_path", intensity_name},
                        {"gt_depth_path", depth_name},
                        {"signal", s.sbr.signal},
                        {"background", s.sbr.background},
                        {"seed", s.seed},
                        {"label", s.sbr.label()},
                        {"wall_extent", s.wall_extent}});
  }
  write_manifest(out_dir, manifest);
}

std::vector<NlosSample> load_nlos_dataset(const fs::path& dir) {
  std::vector<NlosSample> out;
  for (const auto& e : read_manifest(dir)) {
    try {
      NlosSample s;
      s.cube = load_cube(dir / e.at("cube_path").get<std::string>());
      s.clean = load_cube(dir / e.at("clean_path").get<std::string>());
      s.intensity = load_intensity_png(dir / e.at("intensity_path").get<std::string>());
      s.depth = load_depth_png(dir / e.at("gt_depth_path").get<std::string>());
      s.sbr = {e.at("signal").get<double>(), e.at("background").get<double>()};
      s.seed = e.at("seed").get<uint64_t>();
      s.wall_extent = e.value("wall_extent", 1.0);
      out.push_back(std::move(s));
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad manifest entry: ") + ex.what());
    }
  }
  return out;
}

}  // namespace trtkit
