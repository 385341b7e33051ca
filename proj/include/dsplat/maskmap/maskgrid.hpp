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

#include <set>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

// Binary edit-region mask with its origin coordinates on the (time, pose)
// plane. `clamped_query` is set when a warp query fell outside the grid and
// was clamped.
struct SemanticMask {
  Mask mask;
  double t = 0.0;
  double p = 0.0;
  bool clamped_query = false;
};

// Node mask on the (t, p) lattice, stored as {0,1} floats.
struct MaskNode {
  double t = 0.0;
  double p = 0.0;
  std::vector<float> values;  // width*height, in [0,1]
};

// Complete rectangular lattice of masks over time nodes x pose nodes,
// queryable anywhere by bilinear interpolation.
class MaskGrid {
 public:
  MaskGrid() = default;

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<double>& time_nodes() const { return times_; }
  const std::vector<double>& pose_nodes() const { return poses_; }
  bool empty() const { return times_.empty() || poses_.empty(); }

  const std::vector<float>& node(int ti, int pi) const {
    return values_[static_cast<std::size_t>(ti) * poses_.size() + pi];
  }

  friend MaskGrid build_mask_grid(const std::vector<MaskNode>& nodes, int width,
                                  int height);

  // Per-pixel bilinear interpolation over the four surrounding nodes,
  // thresholded at >= theta. Queries outside the node range are clamped and
  // flagged.
  SemanticMask warp(double t, double p, double theta = 0.5) const;

  // Raw interpolated values before thresholding.
  std::vector<double> interpolate(double t, double p,
                                  bool* clamped = nullptr) const;

 private:
  int width_ = 0, height_ = 0;
  std::vector<double> times_;
  std::vector<double> poses_;
  std::vector<std::vector<float>> values_;  // times-major
};

// Assembles the grid from per-node masks. Every (t, p) combination present
// in the node list must be covered exactly once and all masks must share one
// resolution.
MaskGrid build_mask_grid(const std::vector<MaskNode>& nodes, int width,
                         int height);

inline MaskNode mask_node_from_mask(const Mask& m, double t, double p) {
  MaskNode node;
  node.t = t;
  node.p = p;
  node.values.assign(m.data.begin(), m.data.end());
  for (float& v : node.values) v = v != 0.0f ? 1.0f : 0.0f;
  return node;
}

SemanticMask warp_mask(const MaskGrid& grid, double t, double p,
                       double theta = 0.5);

// Splats contributing inside the warped masks, with their accumulated
// contribution weight.
struct SplatSelection {
  std::vector<int> indices;          // sorted ascending
  std::vector<double> weights;       // aligned with indices
  std::set<int> index_set;

  bool contains(int i) const { return index_set.count(i) != 0; }
  bool empty() const { return indices.empty(); }
};

struct SelectNode {
  int frame = 0;      // index into the mesh-frame sequence
  int camera = 0;     // index into the camera list
  double t = 0.0;     // time coordinate on the grid
  double p = 0.0;     // pose coordinate on the grid
};

// Renders the posed scene at every sample node, accumulates each splat's
// contribution weight over pixels inside warp_mask(t, p), and keeps splats
// with accumulated weight > w_min.
SplatSelection select_splats(const Scene& scene,
                             const std::vector<MeshFrame>& frames,
                             const std::vector<Camera>& cameras,
                             const MaskGrid& grid,
                             const std::vector<SelectNode>& nodes,
                             double w_min = 1e-3);

}  // namespace dsplat
