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
//
// Independent test oracles. These reimplement the checked math in the most
// direct way possible and must stay independent of the library paths they
// verify (no tiling, no prepared scenes, no shared helpers beyond types).

#pragma once

#include <random>

#include "dsplat/core/types.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/image.hpp"

namespace dsplat::oracle {

// Per-pixel brute-force renderer: every splat is projected and evaluated at
// every pixel, composited in depth order. No tiles, no bounding boxes, no
// early exit shortcuts beyond the spec'd transmittance cutoff.
Image3 naive_render(const Scene& scene, const Camera& cam);

// Direct four-node bilinear formula.
double bilinear4(double v00, double v01, double v10, double v11, double u,
                 double v);

// Straightforward SSIM with the 11x11 Gaussian window, sigma 1.5,
// K1 = 0.01, K2 = 0.03, channel-averaged; plain quadruple loops.
double ssim_reference(const Image3& a, const Image3& b);

// Random well-conditioned scene for gradient checks: separated depths,
// moderate scales and opacities, interior colors.
Scene random_scene(std::mt19937_64& rng, int n_splats, const Camera& cam);

Camera small_camera(int size = 24, double focal = 48.0);

}  // namespace dsplat::oracle
