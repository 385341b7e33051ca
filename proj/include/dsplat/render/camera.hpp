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

#include <string>

#include "dsplat/core/types.hpp"

namespace dsplat {

// Pinhole camera: x_cam = rotation * x_world + translation, pixel =
// (fx*x/z + cx, fy*y/z + cy). `pose_index` is the camera's position in the
// dataset's circular camera ordering and doubles as the scalar pose
// coordinate p of the mask grid.
struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int width = 0, height = 0;
  int pose_index = 0;
  std::string name;

  void validate() const;
  Vec3 to_camera(const Vec3& world) const {
    return rotation * world + translation;
  }
};

// Camera at `eye` looking at `target`, +y-ish up.
Camera make_look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up,
                           double focal, int width, int height);

}  // namespace dsplat
