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

// Binary splat file: 8-byte magic "DSPLAT\0\x01", little-endian, 32-bit
// float fields. Per-splat record: mu(3), q(4), s(3), opacity, color(3),
// label(i32), decoupled(u8), has_binding(u8), binding block (triangle i32,
// plane_bary(3), bary(3), normal_offset, local_rotation(4), local_scale(3),
// initial_offset(3)); the binding block is zeroed when absent.
void save_scene(const std::string& path, const Scene& scene);
Scene load_scene(const std::string& path);

}  // namespace dsplat
