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

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace dsplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Quaternions are stored as (w, x, y, z) with the Hamilton product.
using Quat = Eigen::Vector4d;

inline Quat quat_identity() { return Quat(1.0, 0.0, 0.0, 0.0); }

inline Quat quat_multiply(const Quat& a, const Quat& b) {
  return Quat(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
              a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
              a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
              a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

inline Quat quat_conjugate(const Quat& q) {
  return Quat(q[0], -q[1], -q[2], -q[3]);
}

inline Quat quat_normalized(const Quat& q) { return q / q.norm(); }

Mat3 quat_to_matrix(const Quat& q);
Quat matrix_to_quat(const Mat3& r);

// Splats are attached to a mesh triangle through local coordinates taken in
// the bind-frame triangle frame. `plane_bary` are the barycentric coordinates
// of the splat center projected onto the triangle plane (unclamped, so the
// bind position is reproducible exactly even when the projection falls
// outside the triangle); `bary` is the same point clamped to the triangle.
// `normal_offset` is the signed plane distance divided by the bind-frame
// triangle scale, so posing scales it with the triangle.
struct MeshBinding {
  int triangle = -1;
  Vec3 bary = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  Vec3 plane_bary = Vec3(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  double normal_offset = 0.0;
  Quat local_rotation = quat_identity();
  Vec3 local_scale = Vec3::Ones();
  // Local offset at bind time, frozen; the tracking loss measures drift of
  // the current local offset away from it.
  Vec3 initial_offset = Vec3::Zero();
};

struct GaussianSplat {
  Vec3 mu = Vec3::Zero();
  Quat q = quat_identity();     // unit quaternion, (w, x, y, z)
  Vec3 s = Vec3::Ones();        // per-axis scale, strictly positive
  double opacity = 1.0;         // in [0, 1]
  Vec3 color = Vec3::Zero();    // RGB in [0, 1]^3
  int label = 0;                // semantic label id, 0 = unlabeled
  bool decoupled = false;       // decoupled splats skip mesh posing
  std::optional<MeshBinding> binding;
};

using Scene = std::vector<GaussianSplat>;

// Symmetric positive-definite 3x3 covariance.
struct Covariance3 {
  Mat3 sigma = Mat3::Identity();
};

}  // namespace dsplat
