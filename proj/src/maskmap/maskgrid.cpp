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

#include "dsplat/maskmap/maskgrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dsplat/core/check.hpp"
#include "dsplat/rig/binding.hpp"

namespace dsplat {

MaskGrid build_mask_grid(const std::vector<MaskNode>& nodes, int width,
                         int height) {
  DS_CHECK(!nodes.empty(), IncompleteGrid, "no mask nodes given");
  std::set<double> times, poses;
  for (const MaskNode& n : nodes) {
    times.insert(n.t);
    poses.insert(n.p);
    DS_CHECK(n.values.size() == static_cast<std::size_t>(width) * height,
             InvalidParameter, "mask node resolution mismatch");
  }

  MaskGrid grid;
  grid.width_ = width;
  grid.height_ = height;
  grid.times_.assign(times.begin(), times.end());
  grid.poses_.assign(poses.begin(), poses.end());
  grid.values_.assign(grid.times_.size() * grid.poses_.size(), {});

  std::map<std::pair<double, double>, const MaskNode*> by_coord;
  for (const MaskNode& n : nodes) by_coord[{n.t, n.p}] = &n;
  for (std::size_t ti = 0; ti < grid.times_.size(); ++ti) {
    for (std::size_t pi = 0; pi < grid.poses_.size(); ++pi) {
      auto it = by_coord.find({grid.times_[ti], grid.poses_[pi]});
      DS_CHECK(it != by_coord.end(), IncompleteGrid,
               "missing mask node on the (t, p) lattice");
      std::vector<float> v = it->second->values;
      for (float& x : v) {
        DS_CHECK(x >= 0.0f && x <= 1.0f, InvalidParameter,
                 "mask node values must lie in [0, 1]");
        x = x >= 0.5f ? 1.0f : 0.0f;  // stored as binary {0,1}
      }
      grid.values_[ti * grid.poses_.size() + pi] = std::move(v);
    }
  }
  return grid;
}

namespace {

// Bracketing interval so that exact node queries produce weight (1, 0).
void bracket(const std::vector<double>& nodes, double x, int* lo, int* hi,
             double* u, bool* clamped) {
  if (x <= nodes.front()) {
    *lo = *hi = 0;
    *u = 0.0;
    if (x < nodes.front()) *clamped = true;
    return;
  }
  if (x >= nodes.back()) {
    *lo = *hi = static_cast<int>(nodes.size()) - 1;
    *u = 0.0;
    if (x > nodes.back()) *clamped = true;
    return;
  }
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  *hi = static_cast<int>(it - nodes.begin());
  *lo = *hi - 1;
  if (nodes[*lo] == x) {
    *hi = *lo;
    *u = 0.0;
    return;
  }
  *u = (x - nodes[*lo]) / (nodes[*hi] - nodes[*lo]);
}

}  // namespace

std::vector<double> MaskGrid::interpolate(double t, double p,
                                          bool* clamped) const {
  DS_CHECK(!empty(), IncompleteGrid, "mask grid is empty");
  bool clip = false;
  int t0, t1, p0, p1;
  double ut, up;
  bracket(times_, t, &t0, &t1, &ut, &clip);
  bracket(poses_, p, &p0, &p1, &up, &clip);
  if (clamped) *clamped = clip;

  const std::vector<float>& m00 = node(t0, p0);
  const std::vector<float>& m01 = node(t0, p1);
  const std::vector<float>& m10 = node(t1, p0);
  const std::vector<float>& m11 = node(t1, p1);
  std::vector<double> out(m00.size());
  const double w00 = (1.0 - ut) * (1.0 - up);
  const double w01 = (1.0 - ut) * up;
  const double w10 = ut * (1.0 - up);
  const double w11 = ut * up;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = w00 * m00[i] + w01 * m01[i] + w10 * m10[i] + w11 * m11[i];
  return out;
}

SemanticMask MaskGrid::warp(double t, double p, double theta) const {
  SemanticMask out;
  out.t = t;
  out.p = p;
  const std::vector<double> values = interpolate(t, p, &out.clamped_query);
  out.mask = Mask(width_, height_, 0);
  for (std::size_t i = 0; i < values.size(); ++i)
    out.mask.data[i] = values[i] >= theta ? 1 : 0;
  return out;
}

SemanticMask warp_mask(const MaskGrid& grid, double t, double p, double theta) {
  return grid.warp(t, p, theta);
}

SplatSelection select_splats(const Scene& scene,
                             const std::vector<MeshFrame>& frames,
                             const std::vector<Camera>& cameras,
                             const MaskGrid& grid,
                             const std::vector<SelectNode>& nodes,
                             double w_min) {
  std::vector<double> accum(scene.size(), 0.0);
  RenderConfig cfg;
  cfg.keep_records = true;
  cfg.record_floor = 1e-3;
  for (const SelectNode& node : nodes) {
    DS_CHECK(node.frame >= 0 && node.frame < static_cast<int>(frames.size()),
             InvalidParameter, "select node frame out of range");
    DS_CHECK(node.camera >= 0 && node.camera < static_cast<int>(cameras.size()),
             InvalidParameter, "select node camera out of range");
    const Scene posed = pose_splats(scene, frames[node.frame]);
    const Camera& cam = cameras[node.camera];
    const SemanticMask warped = grid.warp(node.t, node.p);
    DS_CHECK(warped.mask.width == cam.width && warped.mask.height == cam.height,
             InvalidParameter, "mask grid resolution does not match camera");
    const RenderOutput out = render(posed, cam, cfg);
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        if (!warped.mask.at(x, y)) continue;
        for (const Contribution& c : out.records_at(x, y))
          accum[c.splat] += c.weight;
      }
    }
  }

  SplatSelection sel;
  for (int i = 0; i < static_cast<int>(scene.size()); ++i) {
    if (accum[i] > w_min) {
      sel.indices.push_back(i);
      sel.weights.push_back(accum[i]);
      sel.index_set.insert(i);
    }
  }
  return sel;
}

}  // namespace dsplat
