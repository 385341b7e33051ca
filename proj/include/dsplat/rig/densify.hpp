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
#include <random>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

// Per-splat accumulators for adaptive density control.
struct DensifyStats {
  std::vector<double> grad_accum;  // accumulated ||dL/d(mean2d)||
  std::vector<int> seen;           // renders in which the splat was visible
  std::vector<double> max_radius;  // max screen radius seen, px
  std::int64_t iteration = 0;

  void resize(std::size_t n) {
    grad_accum.assign(n, 0.0);
    seen.assign(n, 0);
    max_radius.assign(n, 0.0);
  }
  double mean_grad(std::size_t i) const {
    return seen[i] > 0 ? grad_accum[i] / seen[i] : 0.0;
  }
};

struct DensifyConfig {
  double grad_threshold = 2e-4;     // screen-space units per iteration
  double opacity_threshold = 0.005;
  double scene_extent = 1.0;        // clone/split boundary at 1% of this
  double split_scale_shrink = 1.6;
  int interval = 2048;
  std::size_t max_splats = 100000;
};

// Clones small high-gradient splats, splits large ones into two (children
// inherit the parent label and binding), prunes low-opacity splats, resets
// the stats. Must be called at iteration multiples of config.interval.
Scene densify_and_prune(const Scene& scene, DensifyStats& stats,
                        const DensifyConfig& config, std::mt19937_64& rng,
                        const MeshFrame* ref_mesh = nullptr);

}  // namespace dsplat
