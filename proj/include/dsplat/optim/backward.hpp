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

#include <vector>

#include "dsplat/core/params.hpp"
#include "dsplat/core/types.hpp"
#include "dsplat/maskmap/maskgrid.hpp"
#include "dsplat/optim/losses.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"
#include "dsplat/rig/mesh.hpp"

namespace dsplat {

// Optimization space shares the ParamVector layout but stores transformed
// coordinates: mu(3) linear, raw quaternion(4) (normalized on use), log
// scale(3), opacity logit(1), color(3). All gradients produced here are with
// respect to these coordinates.
ParamVector to_optim_params(const Scene& scene);
Scene apply_optim_params(const ParamVector& v, const Scene& base);

// Loss terms attached to one rendered view.
struct ImageLossSpec {
  const Image3* target = nullptr;  // enables the rgb term
  double rgb_weight = 0.0;         // overall multiplier of the rgb term
  double lambda_rgb = 1.0;         // MSE vs perceptual mix inside the term
  const PerceptualMetric* perceptual = nullptr;  // needed when lambda_rgb < 1
  const LabelMap* seg_mask = nullptr;  // enables the label cross-entropy term
  double ce_weight = 0.0;
  // Extra dL/dColor seeded from outside the view (e.g. the adversarial
  // generator term); added to the color adjoint.
  const Image3* extra_color_adjoint = nullptr;
};

// Gradients with respect to the world-space parameters of the posed scene at
// this view; quaternion gradients are homogeneous (projection onto the unit
// sphere happens in the chain to optimization space).
struct SceneGradView {
  std::vector<Vec3> d_mu;
  std::vector<Quat> d_q;
  std::vector<Vec3> d_s;
  std::vector<double> d_opacity;
  std::vector<Vec3> d_color;
  std::vector<double> screen_grad;  // ||dL/d mean2d||, adaptive-density stat
  std::vector<double> radius_px;
  std::vector<char> visible;

  void resize(std::size_t n);
};

struct ViewLoss {
  double rgb = 0.0;
  double ce = 0.0;
  RenderOutput forward;
};

// Forward render plus analytic reverse pass through compositing, the screen
// falloff, projection, and the covariance decomposition.
ViewLoss render_view_backward(const Scene& posed, const Camera& cam,
                              const ImageLossSpec& spec, SceneGradView* grad,
                              const RenderConfig& rc = {});

// Chains one view's world-space gradients into optimization space and adds
// them to accum. `jacs` may be empty when the view was rendered from the
// reference scene directly.
void accumulate_optim_gradient(const Scene& ref_scene, const Scene& posed,
                               const std::vector<PoseJacobian>& jacs,
                               const SceneGradView& view_grad,
                               ParamVector& accum);

// weight * mean over bound splats of ||local offset - initial offset||^2,
// with its gradient.
double add_tracking_offset_gradient(const Scene& ref_scene,
                                    const MeshFrame& ref_mesh, double weight,
                                    ParamVector& accum);

// weight * gs_anchor_loss with the gradient of its quadratic terms.
double add_anchor_gradient(const Scene& ref_scene, const Scene& anchor_ref,
                           const std::map<std::string, double>& prop_weights,
                           const SplatSelection& free_set, double weight,
                           ParamVector& accum);

// One view of the reconstruction objective. frame < 0 renders the reference
// scene without posing.
struct BackwardView {
  int frame = -1;
  const Camera* camera = nullptr;
  const Image3* target = nullptr;
  const LabelMap* seg_mask = nullptr;
};

struct BackwardConfig {
  LossWeights weights;
  const PerceptualMetric* perceptual = nullptr;
  bool include_tracking = false;
  RenderConfig render;
};

struct BackwardResult {
  double total = 0.0;
  double rgb = 0.0;
  double track_offset = 0.0;
  double track_ce = 0.0;
  ParamVector grad;
  std::vector<SceneGradView> view_grads;
};

// Full reconstruction-loss backward: mean over views of the color term plus
// the tracking term, producing the gradient for every packed parameter.
BackwardResult backward(const Scene& ref_scene, const MeshFrame* ref_mesh,
                        const std::vector<const MeshFrame*>& view_meshes,
                        const std::vector<BackwardView>& views,
                        const BackwardConfig& config);

}  // namespace dsplat
