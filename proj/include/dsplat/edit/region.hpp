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

#include <vector>

#include "dsplat/edit/plan.hpp"
#include "dsplat/maskmap/maskgrid.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

struct RegionResult {
  MaskGrid grid;
  std::vector<MaskNode> node_masks;
  SplatSelection selection;
  int base_label = 0;  // label the region was derived from
};

// Locates the splats and per-node masks an instruction refers to. Label
// targets render the label mask per (t, p) node; named regions ("ear",
// "cheek") carve a lateral band out of the face label; left/right
// qualifiers intersect with the subject-frame half-plane, with subject-left
// along +x of the reference mesh. Empty selections raise a no-target error.
RegionResult plan_to_region(const EditInstruction& instruction,
                            const Scene& scene,
                            const std::vector<MeshFrame>& frames,
                            const std::vector<Camera>& cameras,
                            const std::vector<SelectNode>& nodes,
                            const std::vector<LabelInfo>& labels,
                            double w_min = 1e-3);

}  // namespace dsplat
