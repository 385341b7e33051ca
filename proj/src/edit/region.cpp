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

#include "dsplat/edit/region.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "dsplat/core/check.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"

namespace dsplat {

namespace {

// Subject-left in world coordinates (mirror of the viewer frame for a
// subject facing +z with +y up).
const Vec3 kSubjectLeft(1.0, 0.0, 0.0);

int resolve_base_label(const EditInstruction& ins, const Scene& scene,
                       const std::vector<LabelInfo>& labels) {
  if (ins.target_label > 0) return ins.target_label;
  // Named regions are carved from the face label.
  for (const LabelInfo& l : labels)
    if (l.name == "face") return l.id;
  // Fall back to the most common non-zero scene label.
  std::map<int, int> counts;
  for (const GaussianSplat& g : scene)
    if (g.label > 0) ++counts[g.label];
  int best = 0, best_count = 0;
  for (const auto& [label, count] : counts)
    if (count > best_count) {
      best = label;
      best_count = count;
    }
  return best;
}

}  // namespace

RegionResult plan_to_region(const EditInstruction& instruction,
                            const Scene& scene,
                            const std::vector<MeshFrame>& frames,
                            const std::vector<Camera>& cameras,
                            const std::vector<SelectNode>& nodes,
                            const std::vector<LabelInfo>& labels,
                            double w_min) {
  DS_CHECK(!nodes.empty(), InvalidParameter, "no sample nodes given");
  const int base_label = resolve_base_label(instruction, scene, labels);
  DS_CHECK(base_label > 0, Refusal, "no target: region has no base label");

  bool label_exists = false;
  for (const GaussianSplat& g : scene) label_exists |= g.label == base_label;
  DS_CHECK(label_exists, Refusal,
           "no target: label " + std::to_string(base_label) +
               " does not occur in the scene");

  // Region membership per splat in the reference scene.
  const bool lateral_band = !instruction.target_region.empty();
  double min_lat = std::numeric_limits<double>::infinity();
  double max_lat = -std::numeric_limits<double>::infinity();
  double mid_lat = 0.0;
  {
    std::size_t n = 0;
    for (const GaussianSplat& g : scene) {
      if (g.label != base_label) continue;
      const double lat = g.mu.dot(kSubjectLeft);
      min_lat = std::min(min_lat, lat);
      max_lat = std::max(max_lat, lat);
      mid_lat += lat;
      ++n;
    }
    mid_lat /= static_cast<double>(n);
  }

  std::vector<char> in_region(scene.size(), 0);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const GaussianSplat& g = scene[i];
    if (g.label != base_label) continue;
    const double lat = g.mu.dot(kSubjectLeft);
    if (instruction.side == SideQualifier::Left && lat < mid_lat) continue;
    if (instruction.side == SideQualifier::Right && lat > mid_lat) continue;
    if (lateral_band) {
      // Outer halves of the lateral extent on each side.
      const double span = std::max(max_lat - mid_lat, mid_lat - min_lat);
      if (span <= 0.0 || std::abs(lat - mid_lat) < 0.5 * span) continue;
    }
    in_region[i] = 1;
  }

  RegionResult result;
  result.base_label = base_label;

  // Mark the in-region splats with a private label and render its mask at
  // every node, so the pixel masks and the splat filter agree exactly.
  int spare_label = 0;
  for (const GaussianSplat& g : scene) spare_label = std::max(spare_label, g.label);
  spare_label += 1;
  Scene marked = scene;
  for (std::size_t i = 0; i < marked.size(); ++i)
    if (in_region[i]) marked[i].label = spare_label;

  for (const SelectNode& node : nodes) {
    DS_CHECK(node.frame >= 0 && node.frame < static_cast<int>(frames.size()),
             InvalidParameter, "node frame out of range");
    DS_CHECK(node.camera >= 0 && node.camera < static_cast<int>(cameras.size()),
             InvalidParameter, "node camera out of range");
    const Scene posed = pose_splats(marked, frames[node.frame]);
    const Mask mask =
        render_label_mask(posed, cameras[node.camera], spare_label);
    result.node_masks.push_back(mask_node_from_mask(mask, node.t, node.p));
  }
  const Camera& cam0 = cameras[nodes.front().camera];
  result.grid = build_mask_grid(result.node_masks, cam0.width, cam0.height);

  result.selection =
      select_splats(scene, frames, cameras, result.grid, nodes, w_min);
  DS_CHECK(!result.selection.empty(), Refusal,
           "no target: the region selects no splats");
  return result;
}

}  // namespace dsplat
