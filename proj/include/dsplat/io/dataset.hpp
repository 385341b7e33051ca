// Copyright 2026 The Dynasplat Authors
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
#include <string>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/image.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

// Multi-view video dataset described by a manifest.json. The camera order in
// the manifest is the circular pose ordering and defines the scalar pose
// coordinate p; frame timestamps define t. Meshes are loaded eagerly (they
// also get a topology check), images lazily.
struct Dataset {
  std::string root;
  double scene_extent = 1.0;
  std::vector<Camera> cameras;
  std::vector<MeshFrame> frames;
  std::vector<std::vector<std::string>> image_paths;  // [frame][camera]
  std::vector<std::vector<std::string>> label_paths;  // empty when absent

  int n_frames() const { return static_cast<int>(frames.size()); }
  int n_cameras() const { return static_cast<int>(cameras.size()); }
  bool has_labels() const { return !label_paths.empty(); }

  Image3 image(int frame, int camera) const;
  LabelMap labels(int frame, int camera) const;
};

Dataset load_dataset(const std::string& manifest_path);

struct SyntheticConfig {
  std::uint64_t seed = 7;
  int n_cameras = 8;
  int n_frames = 10;
  int resolution = 64;
  int n_splats = 240;
  int subdivisions = 2;
  double deform_amplitude = 0.25;
  double camera_radius = 3.2;
  double focal = 70.0;
};

struct SyntheticResult {
  std::string manifest_path;
  Scene ground_truth;
};

// Deterministic per (seed, config): icosphere mesh with a time-varying jaw
// bulge, ground-truth splats bound to it in three semantic bands, images
// rendered with the engine's own renderer, label maps from the ground-truth
// labels. Everything is written under out_dir.
SyntheticResult generate_synthetic_scene(const std::string& out_dir,
                                         const SyntheticConfig& config);

// Unit icosphere used by the generator; exposed for tests.
MeshFrame make_icosphere(int subdivisions);

}  // namespace dsplat
