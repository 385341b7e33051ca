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

#include "dsplat/rig/densify.hpp"

#include "dsplat/core/check.hpp"
#include "dsplat/core/gaussian.hpp"
#include "dsplat/rig/binding.hpp"

namespace dsplat {

Scene densify_and_prune(const Scene& scene, DensifyStats& stats,
                        const DensifyConfig& config, std::mt19937_64& rng,
                        const MeshFrame* ref_mesh) {
  DS_CHECK(config.interval > 0 && stats.iteration % config.interval == 0,
           InvalidParameter,
           "densify_and_prune must run at iteration multiples of the interval");
  DS_CHECK(stats.grad_accum.size() == scene.size(), InvalidParameter,
           "densify stats do not match the scene");

  const double size_boundary = 0.01 * config.scene_extent;
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Growth budget: each clone or split adds one net splat.
  std::size_t budget =
      config.max_splats > scene.size() ? config.max_splats - scene.size() : 0;

  Scene grown;
  grown.reserve(scene.size() + scene.size() / 4);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const GaussianSplat& g = scene[i];
    const bool hot = stats.mean_grad(i) > config.grad_threshold;
    const bool large = g.s.maxCoeff() > size_boundary;
    if (!hot || budget == 0) {
      grown.push_back(g);
      continue;
    }
    --budget;
    if (!large) {
      // Clone in place; both copies keep the parent's label and binding.
      grown.push_back(g);
      grown.push_back(g);
    } else {
      // Split: two children sampled from the parent Gaussian, scaled down.
      const Mat3 rot = quat_to_matrix(quat_normalized(g.q));
      for (int child = 0; child < 2; ++child) {
        GaussianSplat c = g;
        const Vec3 n(gauss(rng), gauss(rng), gauss(rng));
        c.mu = g.mu + rot * (g.s.cwiseProduct(n));
        c.s = g.s / config.split_scale_shrink;
        grown.push_back(c);
      }
    }
  }

  Scene out;
  out.reserve(grown.size());
  for (const GaussianSplat& g : grown) {
    if (g.opacity < config.opacity_threshold) continue;
    out.push_back(g);
  }

  if (ref_mesh) update_local_coords(out, *ref_mesh);
  stats.resize(out.size());
  return out;
}

}  // namespace dsplat
