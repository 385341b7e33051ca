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

#include "dsplat/render/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsplat/core/check.hpp"
#include "dsplat/core/gaussian.hpp"

namespace dsplat {

std::size_t Mask::count_set() const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

Image3 quantize_image(const Image3& img) {
  Image3 out(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    out.data[i] = quantize8(img.data[i]) / 255.0;
  return out;
}

void Camera::validate() const {
  DS_CHECK(fx > 0.0 && fy > 0.0, InvalidParameter, "focal lengths must be positive");
  DS_CHECK(width > 0 && height > 0, InvalidParameter, "image size must be positive");
  DS_CHECK((rotation * rotation.transpose() - Mat3::Identity()).norm() < 1e-9,
           InvalidParameter, "camera rotation must be orthonormal");
}

Camera make_look_at_camera(const Vec3& eye, const Vec3& target, const Vec3& up,
                           double focal, int width, int height) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  DS_CHECK(right.norm() > 1e-9, InvalidParameter, "up is parallel to view direction");
  right.normalize();
  const Vec3 down = forward.cross(right);
  Camera cam;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  cam.fx = cam.fy = focal;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  cam.width = width;
  cam.height = height;
  return cam;
}

std::optional<Splat2D> project_splat(const GaussianSplat& splat,
                                     const Camera& cam) {
  cam.validate();
  const Vec3 t = cam.to_camera(splat.mu);
  if (t.z() <= kNearPlane) return std::nullopt;

  Splat2D out;
  out.depth = t.z();
  out.mean2d = Vec2(cam.fx * t.x() / t.z() + cam.cx,
                    cam.fy * t.y() / t.z() + cam.cy);

  Eigen::Matrix<double, 2, 3> jac;
  const double inv_z = 1.0 / t.z();
  jac << cam.fx * inv_z, 0.0, -cam.fx * t.x() * inv_z * inv_z,
         0.0, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;

  const Mat3 sigma = covariance_matrix(quat_normalized(splat.q), splat.s);
  const Eigen::Matrix<double, 2, 3> v = jac * cam.rotation;
  out.cov2d = v * sigma * v.transpose() + kLowPassFloor * Mat2::Identity();
  return out;
}

std::vector<int> depth_sort(const std::vector<Splat2D>& splats) {
  std::vector<int> order(splats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (splats[a].depth != splats[b].depth)
      return splats[a].depth < splats[b].depth;
    return splats[a].source < splats[b].source;
  });
  return order;
}

CompositeResult composite_pixel(
    const std::vector<std::pair<Vec3, double>>& contribs) {
  CompositeResult out;
  out.weights.reserve(contribs.size());
  double transmittance = 1.0;
  for (const auto& [color, alpha] : contribs) {
    DS_CHECK(alpha >= 0.0 && alpha < 1.0, InvalidParameter,
             "alpha must be in [0, 1)");
    if (transmittance < kEarlyExitTransmittance) break;
    const double w = alpha * transmittance;
    out.color += color * w;
    out.weights.push_back(w);
    transmittance *= 1.0 - alpha;
  }
  out.transmittance = transmittance;
  return out;
}

PreparedScene prepare_scene(const Scene& scene, const Camera& cam,
                            const RenderConfig& config) {
  cam.validate();
  PreparedScene prep;
  prep.width = cam.width;
  prep.height = cam.height;
  prep.tile_size = config.tile_size;
  prep.tiles_x = (cam.width + config.tile_size - 1) / config.tile_size;
  prep.tiles_y = (cam.height + config.tile_size - 1) / config.tile_size;
  prep.tile_splats.assign(static_cast<std::size_t>(prep.tiles_x) * prep.tiles_y, {});

  std::vector<Splat2D> projected;
  std::vector<PreparedSplat> prepared;
  projected.reserve(scene.size());
  for (int i = 0; i < static_cast<int>(scene.size()); ++i) {
    const GaussianSplat& g = scene[i];
    const Vec3 t = cam.to_camera(g.mu);
    if (t.z() <= kNearPlane) {
      ++prep.culled;
      continue;
    }
    PreparedSplat p;
    p.source = i;
    p.depth = t.z();
    p.t_cam = t;
    const double inv_z = 1.0 / t.z();
    p.mean2d = Vec2(cam.fx * t.x() * inv_z + cam.cx,
                    cam.fy * t.y() * inv_z + cam.cy);

    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx * inv_z, 0.0, -cam.fx * t.x() * inv_z * inv_z,
           0.0, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;
    p.sigma_world = covariance_matrix(quat_normalized(g.q), g.s);
    const Eigen::Matrix<double, 2, 3> v = jac * cam.rotation;
    p.cov2d = v * p.sigma_world * v.transpose() + kLowPassFloor * Mat2::Identity();

    const double det = p.cov2d.determinant();
    if (det < 1e-12) {
      ++prep.skipped_degenerate;
      continue;
    }
    p.cov2d_inv << p.cov2d(1, 1), -p.cov2d(0, 1), -p.cov2d(1, 0), p.cov2d(0, 0);
    p.cov2d_inv /= det;

    const double tr = p.cov2d.trace();
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double lambda_max = 0.5 * tr + disc;
    p.radius_px = 3.0 * std::sqrt(lambda_max);

    // Off-screen cull by the 3-sigma bounding box.
    if (p.mean2d.x() + p.radius_px < 0.0 ||
        p.mean2d.x() - p.radius_px > cam.width - 1 ||
        p.mean2d.y() + p.radius_px < 0.0 ||
        p.mean2d.y() - p.radius_px > cam.height - 1) {
      ++prep.culled;
      continue;
    }

    p.opacity = g.opacity;
    p.color = g.color;
    p.label = g.label;
    prepared.push_back(p);
  }

  std::stable_sort(prepared.begin(), prepared.end(),
                   [](const PreparedSplat& a, const PreparedSplat& b) {
                     if (a.depth != b.depth) return a.depth < b.depth;
                     return a.source < b.source;
                   });
  prep.splats = std::move(prepared);

  for (int k = 0; k < static_cast<int>(prep.splats.size()); ++k) {
    const PreparedSplat& p = prep.splats[k];
    const int x0 = std::max(0, static_cast<int>(std::floor(p.mean2d.x() - p.radius_px)));
    const int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(p.mean2d.x() + p.radius_px)));
    const int y0 = std::max(0, static_cast<int>(std::floor(p.mean2d.y() - p.radius_px)));
    const int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(p.mean2d.y() + p.radius_px)));
    if (x0 > x1 || y0 > y1) continue;
    for (int ty = y0 / config.tile_size; ty <= y1 / config.tile_size; ++ty)
      for (int tx = x0 / config.tile_size; tx <= x1 / config.tile_size; ++tx)
        prep.tile_splats[static_cast<std::size_t>(ty) * prep.tiles_x + tx].push_back(k);
  }
  return prep;
}

RenderOutput render_prepared(const PreparedScene& prep,
                             const RenderConfig& config, int max_label) {
  RenderOutput out;
  out.color = Image3(prep.width, prep.height, 0.0);
  out.labels = LabelMap(prep.width, prep.height, 0);
  out.weight_sum = Image1(prep.width, prep.height, 0.0);
  out.transmittance = Image1(prep.width, prep.height, 1.0);
  out.argmax_splat.assign(out.color.pixel_count(), -1);
  if (config.keep_records) out.records.resize(out.color.pixel_count());
  out.skipped_degenerate = prep.skipped_degenerate;
  out.culled = prep.culled;

  if (config.keep_label_weights) {
    for (const auto& p : prep.splats) max_label = std::max(max_label, p.label);
    out.label_weights.assign(max_label + 1,
                             Image1(prep.width, prep.height, 0.0));
  }

  for (int ty = 0; ty < prep.tiles_y; ++ty) {
    for (int tx = 0; tx < prep.tiles_x; ++tx) {
      const std::vector<int>& list = prep.tile(tx, ty);
      if (list.empty()) continue;
      const int px0 = tx * prep.tile_size;
      const int py0 = ty * prep.tile_size;
      const int px1 = std::min(prep.width, px0 + prep.tile_size);
      const int py1 = std::min(prep.height, py0 + prep.tile_size);
      for (int y = py0; y < py1; ++y) {
        for (int x = px0; x < px1; ++x) {
          const std::size_t pix = static_cast<std::size_t>(y) * prep.width + x;
          double transmittance = 1.0;
          Vec3 color = Vec3::Zero();
          double best_w = 0.0;
          int best = -1;
          for (int idx : list) {
            if (transmittance < kEarlyExitTransmittance) break;
            const PreparedSplat& p = prep.splats[idx];
            const Vec2 d(x - p.mean2d.x(), y - p.mean2d.y());
            const double rho = d.dot(p.cov2d_inv * d);
            if (rho >= kRhoCutoff) continue;
            const double alpha =
                std::min(p.opacity * alpha_falloff(rho), kAlphaClamp);
            if (alpha <= 0.0) continue;
            const double w = alpha * transmittance;
            color += p.color * w;
            if (w > best_w) {
              best_w = w;
              best = idx;
            }
            if (config.keep_records && w >= config.record_floor)
              out.records[pix].push_back(Contribution{p.source, w});
            if (config.keep_label_weights)
              out.label_weights[p.label].at(x, y) += w;
            transmittance *= 1.0 - alpha;
          }
          out.color.set(x, y, color);
          out.transmittance.at(x, y) = transmittance;
          out.weight_sum.at(x, y) = 1.0 - transmittance;
          if (best >= 0) {
            out.labels.at(x, y) = prep.splats[best].label;
            out.argmax_splat[pix] = prep.splats[best].source;
          }
        }
      }
    }
  }
  return out;
}

RenderOutput render(const Scene& scene, const Camera& cam,
                    const RenderConfig& config) {
  return render_prepared(prepare_scene(scene, cam, config), config);
}

Mask render_label_mask(const Scene& scene, const Camera& cam, int target_label,
                       const RenderConfig& config) {
  DS_CHECK(target_label > 0, InvalidParameter, "target label must be positive");
  RenderConfig cfg = config;
  cfg.keep_records = false;
  const RenderOutput out = render(scene, cam, cfg);
  Mask mask(cam.width, cam.height, 0);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x)
      mask.at(x, y) = out.labels.at(x, y) == target_label ? 1 : 0;
  return mask;
}

}  // namespace dsplat
