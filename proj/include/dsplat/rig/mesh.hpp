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

#include <array>
#include <vector>

#include "dsplat/core/types.hpp"

namespace dsplat {

// Posed triangle mesh at one timestep; the animated-mesh stand-in that
// drives splat placement.
struct MeshFrame {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  int timestamp = 0;

  void validate() const;  // index range + non-degenerate triangles
  bool same_topology(const MeshFrame& o) const;
};

// Local frame of one triangle: origin at the barycenter, columns
// (normalized edge1, normal x edge1 normalized, normal), scale sqrt(area).
struct TriangleFrame {
  Vec3 origin = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double scale = 1.0;
};

TriangleFrame triangle_frame(const MeshFrame& mesh, int tri_id);

}  // namespace dsplat
