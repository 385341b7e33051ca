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

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsplat/io/dataset.hpp"
#include "dsplat/maskmap/maskgrid.hpp"
#include "dsplat/optim/adam.hpp"
#include "dsplat/optim/backward.hpp"
#include "dsplat/optim/discriminator.hpp"
#include "dsplat/optim/losses.hpp"
#include "dsplat/rig/densify.hpp"

namespace dsplat {

struct FitConfig {
  std::int64_t iterations = 5000;
  std::uint64_t seed = 0;
  LossWeights weights;          // lambda_rgb defaults to the modeling value
  LrSchedule schedule{1e-3, 1e-5, 5000};
  DensifyConfig densify;
  int holdout_camera = -1;      // excluded from training views
  bool include_tracking = true;
  std::size_t max_splats = 500;
  std::string out_dir;          // empty -> no checkpoints or logs
  std::int64_t checkpoint_every = 1000;
  std::int64_t log_every = 10;
  std::atomic<bool>* stop_requested = nullptr;  // checkpoint and exit when set
};

struct FitResult {
  Scene scene;
  double final_loss = 0.0;
  std::int64_t iterations_run = 0;
  std::string checkpoint_path;
  std::string log_path;
};

// Modeling stage: pose -> render -> reconstruction loss -> backward -> Adam,
// with adaptive density control on the configured cadence and labels
// assigned from the dataset's segmenter masks.
FitResult fit_modeling_stage(const Dataset& dataset, const FitConfig& config);

// Initial scene for the modeling stage: one splat per triangle of the first
// mesh frame, bound to it.
Scene init_scene_from_mesh(const MeshFrame& mesh);

struct EditNode {
  int frame = 0;
  int camera = 0;
  Image3 target;  // edited image at this (t, p) node
  Mask region;    // warped edit-region mask at this node
};

struct EditConfig {
  std::int64_t iterations = 800;
  std::uint64_t seed = 0;
  LossWeights weights;  // lambda_rgb should carry the editing value (0.7)
  LrSchedule schedule{1e-3, 1e-5, 800};
  int discriminator_steps = 1;  // k_D
  int patch_size = 16;
  int patches_per_step = 8;
  double discriminator_lr = 1e-3;
  std::string out_dir;
  std::int64_t log_every = 10;
  std::atomic<bool>* stop_requested = nullptr;
};

struct EditResult {
  Scene scene;
  double final_loss = 0.0;
  std::int64_t iterations_run = 0;
  std::string checkpoint_path;
  std::string log_path;
};

// Editing stage: alternating discriminator steps on (edited target, render)
// patch pairs and scene steps on the normalized edit objective with the
// anchor referencing the pre-edit scene.
EditResult fit_editing_stage(const Scene& pre_edit, const MeshFrame& ref_mesh,
                             const std::vector<MeshFrame>& frames,
                             const std::vector<Camera>& cameras,
                             const SplatSelection& selection,
                             const std::vector<EditNode>& nodes,
                             const EditConfig& config);

void save_adam_state(const std::string& path, const AdamState& state);
AdamState load_adam_state(const std::string& path);

}  // namespace dsplat
