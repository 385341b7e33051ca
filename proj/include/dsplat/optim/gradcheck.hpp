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
#include <cstdint>
#include <string>

namespace dsplat {

struct GradCheckConfig {
  std::uint64_t seed = 1;
  int scenes = 100;
  int splats = 20;
  double step = 1e-4;       // central-difference half step
  double tolerance = 1e-3;  // max allowed relative error
};

struct GradCheckReport {
  // position, rotation, scale, opacity, color
  std::array<double, 5> max_rel_error{};
  double overall = 0.0;
  bool pass = false;
  std::string text;

  static const std::array<const char*, 5>& class_names();
};

// Verifies the analytic backward pass against central finite differences of
// the rendered MSE loss on random well-conditioned scenes. Per-coordinate
// relative error uses a floor of 1e-3 times the scene's gradient infinity
// norm, since coordinates that small sit below what h = 1e-4 differences can
// resolve.
GradCheckReport run_gradcheck(const GradCheckConfig& config);

}  // namespace dsplat
