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

#include "dsplat/core/params.hpp"

#include <algorithm>
#include <cmath>

#include "dsplat/core/check.hpp"

namespace dsplat {

const std::array<ParamField, 5>& ParamVector::layout() {
  static const std::array<ParamField, 5> fields = {{
      {"mu", 3, kMuOffset},
      {"q", 4, kQuatOffset},
      {"s", 3, kScaleOffset},
      {"opacity", 1, kOpacityOffset},
      {"color", 3, kColorOffset},
  }};
  return fields;
}

ParamVector pack_params(const Scene& scene) {
  ParamVector v;
  v.splat_count = scene.size();
  v.values.resize(scene.size() * ParamVector::kPerSplat);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    double* p = v.splat_data(i);
    const GaussianSplat& g = scene[i];
    for (int k = 0; k < 3; ++k) p[ParamVector::kMuOffset + k] = g.mu[k];
    for (int k = 0; k < 4; ++k) p[ParamVector::kQuatOffset + k] = g.q[k];
    for (int k = 0; k < 3; ++k) p[ParamVector::kScaleOffset + k] = g.s[k];
    p[ParamVector::kOpacityOffset] = g.opacity;
    for (int k = 0; k < 3; ++k) p[ParamVector::kColorOffset + k] = g.color[k];
  }
  return v;
}

namespace {

double clamp01(double x, bool* clamped) {
  if (x < 0.0 || x > 1.0) {
    *clamped = true;
    return std::clamp(x, 0.0, 1.0);
  }
  return x;
}

}  // namespace

Scene unpack_params(const ParamVector& v, const Scene& base,
                    UnpackStats* stats) {
  DS_CHECK(v.values.size() == v.splat_count * ParamVector::kPerSplat, Layout,
           "parameter vector length does not match its layout");
  DS_CHECK(v.splat_count == base.size(), Layout,
           "parameter vector does not match the base scene");
  UnpackStats local;
  Scene scene = base;
  for (std::size_t i = 0; i < v.splat_count; ++i) {
    const double* p = v.splat_data(i);
    GaussianSplat& g = scene[i];
    for (int k = 0; k < 3; ++k) g.mu[k] = p[ParamVector::kMuOffset + k];
    for (int k = 0; k < 4; ++k) g.q[k] = p[ParamVector::kQuatOffset + k];
    for (int k = 0; k < 3; ++k) g.s[k] = p[ParamVector::kScaleOffset + k];
    g.opacity = p[ParamVector::kOpacityOffset];
    for (int k = 0; k < 3; ++k) g.color[k] = p[ParamVector::kColorOffset + k];

    const double n2 = g.q.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-12) {
      g.q /= std::sqrt(n2);
      local.quaternions_renormalized = true;
    }
    g.opacity = clamp01(g.opacity, &local.values_clamped);
    for (int k = 0; k < 3; ++k)
      g.color[k] = clamp01(g.color[k], &local.values_clamped);
  }
  if (stats) *stats = local;
  return scene;
}

}  // namespace dsplat
