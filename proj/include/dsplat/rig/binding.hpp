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

#include "dsplat/core/types.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

// Binds every splat to its nearest triangle (point-to-triangle distance) and
// records local coordinates so that posing on the same frame reproduces the
// splat exactly.
Scene bind_splats(const Scene& scene, const MeshFrame& mesh);

// Recomputes the local coordinates of already-bound splats from their
// current world parameters, keeping the assigned triangle. Called after
// optimizer steps so bindings stay in sync with the reference parameters.
void update_local_coords(Scene& scene, const MeshFrame& ref_mesh);

// Poses bound splats onto `mesh`. Unbound and decoupled splats pass through
// unchanged; labels and colors are never touched.
Scene pose_splats(const Scene& scene, const MeshFrame& mesh);

// Differential of the posing map, used by the backward pass.
// world position at t:  mu_t = A * mu_ref + const
// world rotation at t:  R_t = rot_rel * R_ref
// world scale at t:     s_t = scale_rel * s_ref
struct PoseJacobian {
  Mat3 position = Mat3::Identity();
  Mat3 rot_rel = Mat3::Identity();
  Quat rot_rel_quat = quat_identity();
  double scale_rel = 1.0;
};

std::vector<PoseJacobian> pose_jacobians(const Scene& scene,
                                         const MeshFrame& ref_mesh,
                                         const MeshFrame& mesh);

// Local offset of a splat center in its bind triangle frame (dimensionless,
// normalized by triangle scale). The tracking loss penalizes drift of this
// offset from its value at bind time.
Vec3 local_offset(const Vec3& mu, const MeshFrame& ref_mesh,
                  const MeshBinding& binding);

// d(local_offset)/d(mu), a constant 3x3 per triangle.
Mat3 local_offset_jacobian(const MeshFrame& ref_mesh, const MeshBinding& binding);

}  // namespace dsplat
