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

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/maskmap/maskgrid.hpp"
#include "dsplat/render/image.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

struct LossWeights {
  double lambda_rgb = 0.9;    // color-loss mix: 0.9 modeling, 0.7 editing
  double lambda_track = 0.5;  // tracking-loss mix
  double lambda_rec = 0.8;    // reconstruction total mix
  std::map<std::string, double> lambda_gs = {
      {"position", 1.0}, {"transform", 1.0}, {"color", 1.0}};
  double edit_rgb = 1.0;   // lambda_1
  double edit_gs = 1.0;    // lambda_2
  double edit_gan = 0.1;   // lambda_3
};

// Pluggable perceptual metric; the default proxy compares gradient-magnitude
// maps over a 3-level downsampling pyramid. A pretrained-network metric can
// be swapped in behind this interface.
class PerceptualMetric {
 public:
  virtual ~PerceptualMetric() = default;
  virtual std::string name() const = 0;
  virtual double compare(const Image3& a, const Image3& b) const = 0;
  // d(compare)/d(b); metrics used inside training must implement this.
  virtual Image3 gradient_wrt_second(const Image3& a, const Image3& b) const = 0;
};

class GradientMagnitudeMetric : public PerceptualMetric {
 public:
  std::string name() const override { return "gradmag-proxy"; }
  double compare(const Image3& a, const Image3& b) const override;
  Image3 gradient_wrt_second(const Image3& a, const Image3& b) const override;

  static constexpr int kLevels = 3;
};

// lambda * MSE + (1 - lambda) * perceptual(reference, test).
double rgb_loss(const Image3& reference, const Image3& test, double lambda,
                const PerceptualMetric& perceptual);

// lambda * mean_splats ||local offset - initial offset||^2 +
// (1 - lambda) * mean_pixels cross-entropy(soft label prediction, target).
// The soft prediction at a pixel assigns each label its accumulated
// contribution weight; background mass is the final transmittance plus the
// label-0 weight. Predictions are floored at 1e-4 inside the log.
struct TrackingLossInput {
  const Scene* scene = nullptr;          // reference-frame scene with bindings
  const MeshFrame* ref_mesh = nullptr;   // binding frame
  const RenderOutput* rendered = nullptr;  // must carry label_weights
  const LabelMap* segmenter_mask = nullptr;
};
double tracking_loss(const TrackingLossInput& in, double lambda);
constexpr double kLabelProbFloor = 1e-4;

// Sum over properties {position, transform, color} and splats of
// lambda_i * ||prop - prop_ref||^2; free-set splats are down-weighted 100x.
double gs_anchor_loss(const Scene& scene, const Scene& reference,
                      const std::map<std::string, double>& weights,
                      const SplatSelection& free_set);
constexpr double kFreeSetAnchorScale = 0.01;

double hinge_d_loss(const std::vector<double>& real_scores,
                    const std::vector<double>& fake_scores);
double hinge_g_loss(const std::vector<double>& fake_scores);

// lambda * rgb + (1 - lambda) * tracking.
double total_rec_loss(double rgb, double tracking, double lambda);

// (l1*rgb + l2*gs + l3*gan) / (l1 + l2 + l3).
double total_edit_loss(double rgb, double gs, double gan, double l1, double l2,
                       double l3);

}  // namespace dsplat
