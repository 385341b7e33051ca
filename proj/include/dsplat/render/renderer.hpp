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

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/image.hpp"

namespace dsplat {

struct Splat2D {
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Identity();  // px^2, SPD
  double depth = 0.0;             // camera-space z
  int source = -1;                // index into the scene
};

// Simple binary pixel mask (1 = set).
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Mask() = default;
  Mask(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t count_set() const;
};

struct Contribution {
  int splat = -1;     // scene index
  double weight = 0;  // alpha_i * prod_{j<i} (1 - alpha_j)
};

struct RenderConfig {
  int tile_size = 16;
  // Contributions below this weight are not recorded (they still composite).
  double record_floor = 1e-3;
  bool keep_records = true;
  // Accumulate per-label weight images (used by the tracking loss).
  bool keep_label_weights = false;
};

struct RenderOutput {
  Image3 color;
  LabelMap labels;       // label of the max-weight contributor, 0 if none
  Image1 weight_sum;     // sum of all contribution weights = 1 - transmittance
  Image1 transmittance;  // final transmittance per pixel
  std::vector<std::vector<Contribution>> records;  // per pixel, row-major
  std::vector<int> argmax_splat;                   // per pixel, -1 if none
  std::vector<Image1> label_weights;  // indexed by label id, may be empty
  int skipped_degenerate = 0;
  int culled = 0;

  const std::vector<Contribution>& records_at(int x, int y) const {
    return records[static_cast<std::size_t>(y) * color.width + x];
  }
};

// Alpha response in screen space. rho = d^T cov2d^{-1} d; the raw Gaussian
// falloff exp(-rho/2) is faded to zero with a C1 window so the image is a
// differentiable function of the splat parameters across the 3-sigma cutoff.
constexpr double kRhoCutoff = 9.0;       // (3 sigma)^2
constexpr double kRhoWindowStart = 6.25; // (2.5 sigma)^2
constexpr double kAlphaClamp = 0.999;
constexpr double kEarlyExitTransmittance = 1e-4;
constexpr double kNearPlane = 0.01;
constexpr double kLowPassFloor = 0.3;  // px^2 added to cov2d

inline double falloff_window(double rho) {
  if (rho <= kRhoWindowStart) return 1.0;
  if (rho >= kRhoCutoff) return 0.0;
  const double x = (kRhoCutoff - rho) / (kRhoCutoff - kRhoWindowStart);
  return x * x * (3.0 - 2.0 * x);
}

inline double falloff_window_drho(double rho) {
  if (rho <= kRhoWindowStart || rho >= kRhoCutoff) return 0.0;
  const double inv = 1.0 / (kRhoCutoff - kRhoWindowStart);
  const double x = (kRhoCutoff - rho) * inv;
  return -6.0 * x * (1.0 - x) * inv;
}

inline double alpha_falloff(double rho) {
  return std::exp(-0.5 * rho) * falloff_window(rho);
}

inline double alpha_falloff_drho(double rho) {
  const double g = std::exp(-0.5 * rho);
  return g * (-0.5 * falloff_window(rho) + falloff_window_drho(rho));
}

// Perspective projection of one splat. Returns nullopt when the splat is
// behind the near plane. cov2d = J * W * Sigma * W^T * J^T + 0.3 * I with J
// the local affine Jacobian of the perspective map at the splat center.
std::optional<Splat2D> project_splat(const GaussianSplat& splat,
                                     const Camera& cam);

// Ascending depth; ties keep source-index order.
std::vector<int> depth_sort(const std::vector<Splat2D>& splats);

struct CompositeResult {
  Vec3 color = Vec3::Zero();
  std::vector<double> weights;
  double transmittance = 1.0;
};

// Front-to-back compositing of depth-ordered (color, alpha) pairs with early
// exit when the transmittance drops below 1e-4.
CompositeResult composite_pixel(
    const std::vector<std::pair<Vec3, double>>& contribs);

// Projection + tile binning shared by the forward render and the analytic
// backward pass. `splats` is depth-sorted; tile lists hold indices into it
// in that order.
struct PreparedSplat {
  int source = -1;
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Identity();
  Mat2 cov2d_inv = Mat2::Identity();
  double depth = 0.0;
  Vec3 t_cam = Vec3::Zero();    // camera-space center
  Mat3 sigma_world = Mat3::Identity();
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
  int label = 0;
  double radius_px = 0.0;  // 3 * sqrt(lambda_max(cov2d))
};

struct PreparedScene {
  std::vector<PreparedSplat> splats;
  int tiles_x = 0, tiles_y = 0, tile_size = 16;
  int width = 0, height = 0;
  std::vector<std::vector<int>> tile_splats;
  int skipped_degenerate = 0;
  int culled = 0;

  const std::vector<int>& tile(int tx, int ty) const {
    return tile_splats[static_cast<std::size_t>(ty) * tiles_x + tx];
  }
};

PreparedScene prepare_scene(const Scene& scene, const Camera& cam,
                            const RenderConfig& config = {});

RenderOutput render(const Scene& scene, const Camera& cam,
                    const RenderConfig& config = {});

// Rasterizes an already-prepared scene; `max_label` bounds the label-weight
// image count when label weights are kept.
RenderOutput render_prepared(const PreparedScene& prep,
                             const RenderConfig& config, int max_label = 0);

// Pixels whose label-map entry equals target_label (> 0 required).
Mask render_label_mask(const Scene& scene, const Camera& cam,
                       int target_label, const RenderConfig& config = {});

}  // namespace dsplat
