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

#include "dsplat/optim/losses.hpp"

#include <algorithm>
#include <cmath>

#include "dsplat/core/check.hpp"
#include "dsplat/io/metrics.hpp"
#include "dsplat/rig/binding.hpp"

namespace dsplat {

double rgb_loss(const Image3& reference, const Image3& test, double lambda,
                const PerceptualMetric& perceptual) {
  DS_CHECK(reference.same_size(test), InvalidParameter,
           "image dimensions differ");
  DS_CHECK(lambda >= 0.0 && lambda <= 1.0, InvalidParameter,
           "lambda must lie in [0, 1]");
  const double mse = mean_squared_error(reference, test);
  if (lambda == 1.0) return mse;
  return lambda * mse + (1.0 - lambda) * perceptual.compare(reference, test);
}

double tracking_loss(const TrackingLossInput& in, double lambda) {
  DS_CHECK(in.scene && in.ref_mesh, InvalidParameter,
           "incomplete tracking-loss input");
  DS_CHECK(lambda == 1.0 || (in.rendered && in.segmenter_mask),
           InvalidParameter,
           "label term needs a render with label weights and a segmenter mask");
  DS_CHECK(lambda >= 0.0 && lambda <= 1.0, InvalidParameter,
           "lambda must lie in [0, 1]");

  // Mesh term: drift of local offsets from their bind-time values.
  double offset_term = 0.0;
  std::size_t bound = 0;
  for (const GaussianSplat& g : *in.scene) {
    if (!g.binding || g.decoupled) continue;
    const Vec3 current = local_offset(g.mu, *in.ref_mesh, *g.binding);
    offset_term += (current - g.binding->initial_offset).squaredNorm();
    ++bound;
  }
  if (bound > 0) offset_term /= static_cast<double>(bound);
  if (lambda == 1.0) return offset_term;

  // Label term: per-pixel cross-entropy of the soft label prediction.
  const RenderOutput& out = *in.rendered;
  DS_CHECK(!out.label_weights.empty(), InvalidParameter,
           "tracking loss needs a render with label weights");
  const LabelMap& seg = *in.segmenter_mask;
  DS_CHECK(seg.width == out.color.width && seg.height == out.color.height,
           InvalidParameter, "segmenter mask does not match the render");
  double ce = 0.0;
  const int n_labels = static_cast<int>(out.label_weights.size());
  for (int y = 0; y < seg.height; ++y) {
    for (int x = 0; x < seg.width; ++x) {
      const int target = seg.at(x, y);
      double p;
      if (target < n_labels)
        p = out.label_weights[target].at(x, y);
      else
        p = 0.0;
      if (target == 0) p += out.transmittance.at(x, y);
      ce += -std::log(std::max(p, kLabelProbFloor));
    }
  }
  ce /= static_cast<double>(seg.width) * seg.height;

  return lambda * offset_term + (1.0 - lambda) * ce;
}

double gs_anchor_loss(const Scene& scene, const Scene& reference,
                      const std::map<std::string, double>& weights,
                      const SplatSelection& free_set) {
  DS_CHECK(scene.size() == reference.size(), InvalidParameter,
           "scene and reference are not index-aligned");
  const auto weight = [&](const char* key) {
    const auto it = weights.find(key);
    return it != weights.end() ? it->second : 0.0;
  };
  const double w_pos = weight("position");
  const double w_trans = weight("transform");
  const double w_color = weight("color");

  double total = 0.0;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    const GaussianSplat& g = scene[i];
    const GaussianSplat& r = reference[i];
    double term = w_pos * (g.mu - r.mu).squaredNorm() +
                  w_trans * ((g.q - r.q).squaredNorm() +
                             (g.s - r.s).squaredNorm()) +
                  w_color * (g.color - r.color).squaredNorm();
    if (free_set.contains(static_cast<int>(i))) term *= kFreeSetAnchorScale;
    total += term;
  }
  return total;
}

double hinge_d_loss(const std::vector<double>& real_scores,
                    const std::vector<double>& fake_scores) {
  DS_CHECK(!real_scores.empty() && !fake_scores.empty(), InvalidParameter,
           "hinge loss needs non-empty score sets");
  double real = 0.0, fake = 0.0;
  for (double s : real_scores) real += std::max(0.0, 1.0 - s);
  for (double s : fake_scores) fake += std::max(0.0, 1.0 + s);
  return real / real_scores.size() + fake / fake_scores.size();
}

double hinge_g_loss(const std::vector<double>& fake_scores) {
  DS_CHECK(!fake_scores.empty(), InvalidParameter,
           "hinge loss needs non-empty score sets");
  double sum = 0.0;
  for (double s : fake_scores) sum += s;
  return -sum / fake_scores.size();
}

double total_rec_loss(double rgb, double tracking, double lambda) {
  DS_CHECK(lambda >= 0.0 && lambda <= 1.0, InvalidParameter,
           "lambda must lie in [0, 1]");
  return lambda * rgb + (1.0 - lambda) * tracking;
}

double total_edit_loss(double rgb, double gs, double gan, double l1, double l2,
                       double l3) {
  DS_CHECK(l1 >= 0.0 && l2 >= 0.0 && l3 >= 0.0, InvalidParameter,
           "edit-loss weights must be non-negative");
  const double sum = l1 + l2 + l3;
  DS_CHECK(sum > 0.0, InvalidParameter, "edit-loss weights must not all be zero");
  return (l1 * rgb + l2 * gs + l3 * gan) / sum;
}

}  // namespace dsplat
