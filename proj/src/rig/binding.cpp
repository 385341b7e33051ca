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

#include "dsplat/rig/binding.hpp"

#include <cmath>
#include <limits>

#include "dsplat/core/check.hpp"
#include "dsplat/core/gaussian.hpp"

namespace dsplat {

namespace {

// Closest point on a triangle, barycentric coordinates clamped to it.
// Ericson, "Real-Time Collision Detection", 5.1.5.
Vec3 closest_point_bary(const Vec3& p, const Vec3& a, const Vec3& b,
                        const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return Vec3(1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return Vec3(0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return Vec3(1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return Vec3(0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return Vec3(1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return Vec3(0, 1 - w, w);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return Vec3(1 - v - w, v, w);
}

// Unclamped barycentrics of the projection of p onto the triangle plane.
Vec3 plane_projection_bary(const Vec3& p, const Vec3& a, const Vec3& b,
                           const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  Mat2 gram;
  gram << e1.dot(e1), e1.dot(e2), e2.dot(e1), e2.dot(e2);
  const Vec3 n = e1.cross(e2).normalized();
  const Vec3 q = (p - a) - (p - a).dot(n) * n;
  const Vec2 rhs(e1.dot(q), e2.dot(q));
  const Vec2 bc = gram.ldlt().solve(rhs);
  return Vec3(1.0 - bc[0] - bc[1], bc[0], bc[1]);
}

void bind_one(GaussianSplat& g, const MeshFrame& mesh, int tri_id,
              bool freeze_initial) {
  const auto& tri = mesh.triangles[tri_id];
  const Vec3& a = mesh.vertices[tri[0]];
  const Vec3& b = mesh.vertices[tri[1]];
  const Vec3& c = mesh.vertices[tri[2]];
  const TriangleFrame f = triangle_frame(mesh, tri_id);

  MeshBinding bind;
  bind.triangle = tri_id;
  bind.bary = closest_point_bary(g.mu, a, b, c);
  bind.plane_bary = plane_projection_bary(g.mu, a, b, c);
  bind.normal_offset = (g.mu - a).dot(f.rotation.col(2)) / f.scale;
  const Quat tri_quat = matrix_to_quat(f.rotation);
  bind.local_rotation =
      quat_normalized(quat_multiply(quat_conjugate(tri_quat), g.q));
  bind.local_scale = g.s / f.scale;
  bind.initial_offset =
      freeze_initial
          ? Vec3(f.rotation.transpose() * (g.mu - f.origin) / f.scale)
          : (g.binding ? g.binding->initial_offset : Vec3::Zero());
  g.binding = bind;
}

}  // namespace

Scene bind_splats(const Scene& scene, const MeshFrame& mesh) {
  DS_CHECK(!mesh.triangles.empty(), DegenerateGeometry,
           "cannot bind to an empty mesh");
  mesh.validate();
  Scene out = scene;
  for (GaussianSplat& g : out) {
    int best_tri = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      const auto& tri = mesh.triangles[t];
      const Vec3 bary = closest_point_bary(g.mu, mesh.vertices[tri[0]],
                                           mesh.vertices[tri[1]],
                                           mesh.vertices[tri[2]]);
      const Vec3 closest = bary[0] * mesh.vertices[tri[0]] +
                           bary[1] * mesh.vertices[tri[1]] +
                           bary[2] * mesh.vertices[tri[2]];
      const double d = (g.mu - closest).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best_tri = t;
      }
    }
    bind_one(g, mesh, best_tri, /*freeze_initial=*/true);
  }
  return out;
}

void update_local_coords(Scene& scene, const MeshFrame& ref_mesh) {
  for (GaussianSplat& g : scene) {
    if (!g.binding || g.decoupled) continue;
    DS_CHECK(g.binding->triangle >= 0 &&
                 g.binding->triangle < static_cast<int>(ref_mesh.triangles.size()),
             Binding, "binding references a missing triangle");
    bind_one(g, ref_mesh, g.binding->triangle, /*freeze_initial=*/false);
  }
}

Scene pose_splats(const Scene& scene, const MeshFrame& mesh) {
  Scene out = scene;
  for (GaussianSplat& g : out) {
    if (!g.binding || g.decoupled) continue;
    const MeshBinding& bind = *g.binding;
    DS_CHECK(bind.triangle >= 0 &&
                 bind.triangle < static_cast<int>(mesh.triangles.size()),
             Binding, "binding references a missing triangle");
    const auto& tri = mesh.triangles[bind.triangle];
    const TriangleFrame f = triangle_frame(mesh, bind.triangle);
    const Vec3 surface = bind.plane_bary[0] * mesh.vertices[tri[0]] +
                         bind.plane_bary[1] * mesh.vertices[tri[1]] +
                         bind.plane_bary[2] * mesh.vertices[tri[2]];
    g.mu = surface + bind.normal_offset * f.scale * f.rotation.col(2);
    const Quat tri_quat = matrix_to_quat(f.rotation);
    g.q = quat_normalized(quat_multiply(tri_quat, bind.local_rotation));
    g.s = bind.local_scale * f.scale;
  }
  return out;
}

Vec3 local_offset(const Vec3& mu, const MeshFrame& ref_mesh,
                  const MeshBinding& binding) {
  const TriangleFrame f = triangle_frame(ref_mesh, binding.triangle);
  return f.rotation.transpose() * (mu - f.origin) / f.scale;
}

Mat3 local_offset_jacobian(const MeshFrame& ref_mesh,
                           const MeshBinding& binding) {
  const TriangleFrame f = triangle_frame(ref_mesh, binding.triangle);
  return f.rotation.transpose() / f.scale;
}

std::vector<PoseJacobian> pose_jacobians(const Scene& scene,
                                         const MeshFrame& ref_mesh,
                                         const MeshFrame& mesh) {
  DS_CHECK(ref_mesh.same_topology(mesh), Binding,
           "mesh topology mismatch between reference and target frames");
  std::vector<PoseJacobian> jacs(scene.size());
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const GaussianSplat& g = scene[i];
    if (!g.binding || g.decoupled) continue;
    const MeshBinding& bind = *g.binding;
    const auto& tri = ref_mesh.triangles[bind.triangle];
    const TriangleFrame f0 = triangle_frame(ref_mesh, bind.triangle);
    const TriangleFrame ft = triangle_frame(mesh, bind.triangle);

    // Unclamped plane barycentrics are affine in mu; chain them with the
    // normal offset term to get d(mu_t)/d(mu_ref).
    const Vec3 e1 = ref_mesh.vertices[tri[1]] - ref_mesh.vertices[tri[0]];
    const Vec3 e2 = ref_mesh.vertices[tri[2]] - ref_mesh.vertices[tri[0]];
    Mat2 gram;
    gram << e1.dot(e1), e1.dot(e2), e2.dot(e1), e2.dot(e2);
    const Mat2 gram_inv = gram.inverse();
    Eigen::Matrix<double, 2, 3> edges;
    edges.row(0) = e1.transpose();
    edges.row(1) = e2.transpose();
    const Eigen::Matrix<double, 2, 3> dbc = gram_inv * edges;  // d(b,c)/dmu

    const Vec3 u1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Vec3 u2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    PoseJacobian j;
    j.position = u1 * dbc.row(0) + u2 * dbc.row(1) +
                 (ft.scale / f0.scale) * ft.rotation.col(2) *
                     f0.rotation.col(2).transpose();
    j.rot_rel = ft.rotation * f0.rotation.transpose();
    j.rot_rel_quat = matrix_to_quat(j.rot_rel);
    j.scale_rel = ft.scale / f0.scale;
    jacs[i] = j;
  }
  return jacs;
}

}  // namespace dsplat
