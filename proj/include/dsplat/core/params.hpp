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
#include <cstddef>
#include <string>
#include <vector>

#include "dsplat/core/types.hpp"

namespace dsplat {

// One scalar field block of the per-splat parameter layout.
struct ParamField {
  std::string name;
  int size = 0;
  int offset = 0;
};

// Flat vector of every optimizable scalar of a scene. Layout per splat:
// mu(3), q(4), s(3), opacity(1), color(3); 14 scalars.
struct ParamVector {
  std::vector<double> values;
  std::size_t splat_count = 0;

  static constexpr int kPerSplat = 14;
  static constexpr int kMuOffset = 0;
  static constexpr int kQuatOffset = 3;
  static constexpr int kScaleOffset = 7;
  static constexpr int kOpacityOffset = 10;
  static constexpr int kColorOffset = 11;

  static const std::array<ParamField, 5>& layout();

  double* splat_data(std::size_t i) { return values.data() + i * kPerSplat; }
  const double* splat_data(std::size_t i) const {
    return values.data() + i * kPerSplat;
  }
};

struct UnpackStats {
  bool quaternions_renormalized = false;
  bool values_clamped = false;
};

ParamVector pack_params(const Scene& scene);

// Rebuilds the scene from a parameter vector. Labels, bindings and the
// decoupled flag are carried over from `base`, which must have the same
// splat count. Quaternions are re-normalized and opacity/color clamped to
// [0,1] only when they are out of tolerance, so valid scenes round-trip
// bit-exactly.
Scene unpack_params(const ParamVector& v, const Scene& base,
                    UnpackStats* stats = nullptr);

}  // namespace dsplat
