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

#include "dsplat/rig/mesh.hpp"

#include <cmath>

#include "dsplat/core/check.hpp"

namespace dsplat {

void MeshFrame::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k)
      DS_CHECK(tri[k] >= 0 && tri[k] < n, DegenerateGeometry,
               "triangle index out of range");
    const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
    const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
    DS_CHECK(0.5 * e1.cross(e2).norm() > 1e-12, DegenerateGeometry,
             "degenerate triangle");
  }
}

bool MeshFrame::same_topology(const MeshFrame& o) const {
  return vertices.size() == o.vertices.size() && triangles == o.triangles;
}

TriangleFrame triangle_frame(const MeshFrame& mesh, int tri_id) {
  DS_CHECK(tri_id >= 0 && tri_id < static_cast<int>(mesh.triangles.size()),
           DegenerateGeometry, "triangle id out of range");
  const auto& tri = mesh.triangles[tri_id];
  const Vec3& v0 = mesh.vertices[tri[0]];
  const Vec3& v1 = mesh.vertices[tri[1]];
  const Vec3& v2 = mesh.vertices[tri[2]];

  const Vec3 e1 = v1 - v0;
  const Vec3 cross = e1.cross(v2 - v0);
  const double area = 0.5 * cross.norm();
  DS_CHECK(area > 1e-12, DegenerateGeometry, "degenerate triangle");

  TriangleFrame f;
  f.origin = (v0 + v1 + v2) / 3.0;
  const Vec3 normal = cross.normalized();
  const Vec3 tangent = e1.normalized();
  f.rotation.col(0) = tangent;
  f.rotation.col(1) = normal.cross(tangent);
  f.rotation.col(2) = normal;
  f.scale = std::sqrt(area);
  return f;
}

}  // namespace dsplat
