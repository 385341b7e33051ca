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

#include "dsplat/optim/backward.hpp"

#include <cmath>

#include "dsplat/core/check.hpp"
#include "dsplat/core/gaussian.hpp"
#include "dsplat/io/metrics.hpp"

namespace dsplat {

namespace {

constexpr double kOpacityLogitClamp = 1e-6;

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Left-multiplication matrix: quat_multiply(q, x) == L(q) * x.
Eigen::Matrix4d quat_left_matrix(const Quat& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix4d l;
  l << w, -x, -y, -z,
       x,  w, -z,  y,
       y,  z,  w, -x,
       z, -y,  x,  w;
  return l;
}

// d(R)/d(q_k) of the unit-quaternion rotation formula, taken literally.
std::array<Mat3, 4> rotation_quat_derivatives(const Quat& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  std::array<Mat3, 4> d;
  d[0] << 0, -z, y,
          z, 0, -x,
          -y, x, 0;
  d[1] << 0, y, z,
          y, -2 * x, -w,
          z, w, -2 * x;
  d[2] << -2 * y, x, w,
          x, 0, z,
          -w, z, -2 * y;
  d[3] << -2 * z, -w, x,
          w, -2 * z, y,
          x, y, 0;
  for (Mat3& m : d) m *= 2.0;
  return d;
}

struct PixelContrib {
  int idx = 0;  // index into prep.splats
  double alpha = 0.0;
  double weight = 0.0;
  double rho = 0.0;
  bool clamped = false;
  Vec2 d = Vec2::Zero();
};

}  // namespace

ParamVector to_optim_params(const Scene& scene) {
  ParamVector v = pack_params(scene);
  for (std::size_t i = 0; i < v.splat_count; ++i) {
    double* p = v.splat_data(i);
    for (int k = 0; k < 3; ++k) {
      DS_CHECK(p[ParamVector::kScaleOffset + k] > 0.0, InvalidParameter,
               "scales must be positive to enter log space");
      p[ParamVector::kScaleOffset + k] =
          std::log(p[ParamVector::kScaleOffset + k]);
    }
    const double o = std::clamp(p[ParamVector::kOpacityOffset],
                                kOpacityLogitClamp, 1.0 - kOpacityLogitClamp);
    p[ParamVector::kOpacityOffset] = logit(o);
  }
  return v;
}

Scene apply_optim_params(const ParamVector& v, const Scene& base) {
  DS_CHECK(v.splat_count == base.size(), Layout,
           "optimization vector does not match the scene");
  Scene scene = base;
  for (std::size_t i = 0; i < v.splat_count; ++i) {
    const double* p = v.splat_data(i);
    GaussianSplat& g = scene[i];
    for (int k = 0; k < 3; ++k) g.mu[k] = p[ParamVector::kMuOffset + k];
    Quat q;
    for (int k = 0; k < 4; ++k) q[k] = p[ParamVector::kQuatOffset + k];
    g.q = quat_normalized(q);
    for (int k = 0; k < 3; ++k)
      g.s[k] = std::exp(p[ParamVector::kScaleOffset + k]);
    g.opacity = sigmoid(p[ParamVector::kOpacityOffset]);
    for (int k = 0; k < 3; ++k)
      g.color[k] = std::clamp(p[ParamVector::kColorOffset + k], 0.0, 1.0);
  }
  return scene;
}

void SceneGradView::resize(std::size_t n) {
  d_mu.assign(n, Vec3::Zero());
  d_q.assign(n, Quat::Zero());
  d_s.assign(n, Vec3::Zero());
  d_opacity.assign(n, 0.0);
  d_color.assign(n, Vec3::Zero());
  screen_grad.assign(n, 0.0);
  radius_px.assign(n, 0.0);
  visible.assign(n, 0);
}

ViewLoss render_view_backward(const Scene& posed, const Camera& cam,
                              const ImageLossSpec& spec, SceneGradView* grad,
                              const RenderConfig& rc) {
  RenderConfig cfg = rc;
  cfg.keep_records = false;
  cfg.keep_label_weights = spec.seg_mask != nullptr;
  const PreparedScene prep = prepare_scene(posed, cam, cfg);

  ViewLoss out;
  out.forward = render_prepared(prep, cfg);
  const Image3& rendered = out.forward.color;
  const std::size_t n_px = rendered.pixel_count();

  // Color adjoint image and per-pixel cross-entropy factors.
  Image3 color_adj(cam.width, cam.height, 0.0);
  if (spec.target) {
    DS_CHECK(spec.target->same_size(rendered), InvalidParameter,
             "target image dimensions differ from the render");
    const double mse = mean_squared_error(*spec.target, rendered);
    double perc = 0.0;
    if (spec.lambda_rgb < 1.0) {
      DS_CHECK(spec.perceptual != nullptr, InvalidParameter,
               "perceptual metric required when lambda_rgb < 1");
      perc = spec.perceptual->compare(*spec.target, rendered);
    }
    out.rgb = spec.lambda_rgb * mse + (1.0 - spec.lambda_rgb) * perc;
    const double mse_scale =
        spec.rgb_weight * spec.lambda_rgb * 2.0 / static_cast<double>(n_px * 3);
    for (std::size_t i = 0; i < color_adj.data.size(); ++i)
      color_adj.data[i] =
          mse_scale * (rendered.data[i] - spec.target->data[i]);
    if (spec.lambda_rgb < 1.0) {
      const Image3 pg = spec.perceptual->gradient_wrt_second(*spec.target, rendered);
      const double w = spec.rgb_weight * (1.0 - spec.lambda_rgb);
      for (std::size_t i = 0; i < color_adj.data.size(); ++i)
        color_adj.data[i] += w * pg.data[i];
    }
  }
  if (spec.extra_color_adjoint) {
    DS_CHECK(spec.extra_color_adjoint->same_size(rendered), InvalidParameter,
             "extra color adjoint dimensions differ from the render");
    for (std::size_t i = 0; i < color_adj.data.size(); ++i)
      color_adj.data[i] += spec.extra_color_adjoint->data[i];
  }

  std::vector<double> ce_factor;
  std::vector<int> ce_target;
  if (spec.seg_mask) {
    DS_CHECK(spec.seg_mask->width == cam.width &&
                 spec.seg_mask->height == cam.height,
             InvalidParameter, "segmenter mask does not match the camera");
    ce_factor.assign(n_px, 0.0);
    ce_target.assign(n_px, 0);
    const int n_labels = static_cast<int>(out.forward.label_weights.size());
    double ce = 0.0;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        const std::size_t pix = static_cast<std::size_t>(y) * cam.width + x;
        const int tau = spec.seg_mask->at(x, y);
        double p = tau < n_labels ? out.forward.label_weights[tau].at(x, y) : 0.0;
        if (tau == 0) p += out.forward.transmittance.at(x, y);
        ce += -std::log(std::max(p, kLabelProbFloor));
        ce_target[pix] = tau;
        if (p > kLabelProbFloor)
          ce_factor[pix] = -spec.ce_weight / (static_cast<double>(n_px) * p);
      }
    }
    out.ce = ce / static_cast<double>(n_px);
  }

  if (!grad) return out;
  grad->resize(posed.size());
  for (const PreparedSplat& p : prep.splats) {
    grad->visible[p.source] = 1;
    grad->radius_px[p.source] = p.radius_px;
  }

  // Per-splat screen-space accumulators, indexed like prep.splats.
  std::vector<Vec2> g_mean(prep.splats.size(), Vec2::Zero());
  std::vector<Mat2> g_cov(prep.splats.size(), Mat2::Zero());
  std::vector<double> g_opacity(prep.splats.size(), 0.0);
  std::vector<Vec3> g_color(prep.splats.size(), Vec3::Zero());

  std::vector<PixelContrib> contribs;
  contribs.reserve(64);
  for (int ty = 0; ty < prep.tiles_y; ++ty) {
    for (int tx = 0; tx < prep.tiles_x; ++tx) {
      const std::vector<int>& list = prep.tile(tx, ty);
      if (list.empty()) continue;
      const int px0 = tx * prep.tile_size;
      const int py0 = ty * prep.tile_size;
      const int px1 = std::min(cam.width, px0 + prep.tile_size);
      const int py1 = std::min(cam.height, py0 + prep.tile_size);
      for (int y = py0; y < py1; ++y) {
        for (int x = px0; x < px1; ++x) {
          const std::size_t pix = static_cast<std::size_t>(y) * cam.width + x;
          const Vec3 dldc(color_adj.px(x, y)[0], color_adj.px(x, y)[1],
                          color_adj.px(x, y)[2]);
          const double cef = ce_factor.empty() ? 0.0 : ce_factor[pix];
          const int tau = ce_target.empty() ? 0 : ce_target[pix];
          if (dldc.isZero(0.0) && cef == 0.0) continue;

          // Replay the forward walk for this pixel.
          contribs.clear();
          double transmittance = 1.0;
          for (int idx : list) {
            if (transmittance < kEarlyExitTransmittance) break;
            const PreparedSplat& p = prep.splats[idx];
            const Vec2 d(x - p.mean2d.x(), y - p.mean2d.y());
            const double rho = d.dot(p.cov2d_inv * d);
            if (rho >= kRhoCutoff) continue;
            const double raw = p.opacity * alpha_falloff(rho);
            const double alpha = std::min(raw, kAlphaClamp);
            if (alpha <= 0.0) continue;
            PixelContrib pc;
            pc.idx = idx;
            pc.alpha = alpha;
            pc.weight = alpha * transmittance;
            pc.rho = rho;
            pc.clamped = raw > kAlphaClamp;
            pc.d = d;
            contribs.push_back(pc);
            transmittance *= 1.0 - alpha;
          }

          // Reverse sweep: dL/dalpha_i = T_i * phi_i - suffix/(1 - alpha_i)
          // where phi_j = dL/dC . c_j + dL/dw_j.
          double suffix = 0.0;
          for (std::size_t k = contribs.size(); k-- > 0;) {
            const PixelContrib& pc = contribs[k];
            const PreparedSplat& p = prep.splats[pc.idx];
            double phi = dldc.dot(p.color);
            if (cef != 0.0)
              phi += cef * ((p.label == tau ? 1.0 : 0.0) - (tau == 0 ? 1.0 : 0.0));
            const double t_i = pc.weight / pc.alpha;
            const double dalpha = t_i * phi - suffix / (1.0 - pc.alpha);
            suffix += phi * pc.weight;

            g_color[pc.idx] += dldc * pc.weight;
            if (pc.clamped) continue;
            g_opacity[pc.idx] += dalpha * alpha_falloff(pc.rho);
            const double drho = dalpha * p.opacity * alpha_falloff_drho(pc.rho);
            const Vec2 lam_d = p.cov2d_inv * pc.d;
            g_mean[pc.idx] += drho * (-2.0) * lam_d;
            g_cov[pc.idx] += drho * (-1.0) * (lam_d * lam_d.transpose());
          }
        }
      }
    }
  }

  // Geometric chain per splat: screen stats back to world parameters.
  for (std::size_t k = 0; k < prep.splats.size(); ++k) {
    const PreparedSplat& p = prep.splats[k];
    const GaussianSplat& g = posed[p.source];
    grad->screen_grad[p.source] = g_mean[k].norm();
    grad->d_color[p.source] += g_color[k];
    grad->d_opacity[p.source] += g_opacity[k];
    if (g_mean[k].isZero(0.0) && g_cov[k].isZero(0.0)) continue;

    const Vec3 t = p.t_cam;
    const double inv_z = 1.0 / t.z();
    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx * inv_z, 0.0, -cam.fx * t.x() * inv_z * inv_z,
           0.0, cam.fy * inv_z, -cam.fy * t.y() * inv_z * inv_z;
    const Eigen::Matrix<double, 2, 3> v = jac * cam.rotation;

    // cov2d = V Sigma V^T + floor
    const Mat3 d_sigma = v.transpose() * g_cov[k] * v;
    const Eigen::Matrix<double, 2, 3> d_v =
        (g_cov[k] + g_cov[k].transpose()) * v * p.sigma_world;
    const Eigen::Matrix<double, 2, 3> d_jac = d_v * cam.rotation.transpose();

    // mean2d = project(t); d(mean2d)/dt = jac
    Vec3 d_t = jac.transpose() * g_mean[k];
    // J itself depends on t
    const double iz2 = inv_z * inv_z;
    const double iz3 = iz2 * inv_z;
    d_t.x() += d_jac(0, 2) * (-cam.fx * iz2);
    d_t.y() += d_jac(1, 2) * (-cam.fy * iz2);
    d_t.z() += d_jac(0, 0) * (-cam.fx * iz2) + d_jac(1, 1) * (-cam.fy * iz2) +
               d_jac(0, 2) * (2.0 * cam.fx * t.x() * iz3) +
               d_jac(1, 2) * (2.0 * cam.fy * t.y() * iz3);

    grad->d_mu[p.source] += cam.rotation.transpose() * d_t;

    // Sigma = M M^T, M = R diag(s)
    const Quat qhat = quat_normalized(g.q);
    const Mat3 rot = quat_to_matrix(qhat);
    const Mat3 m = rot * g.s.asDiagonal();
    const Mat3 d_m = (d_sigma + d_sigma.transpose()) * m;
    const Mat3 d_rot = d_m * g.s.asDiagonal();
    const Mat3 rt_dm = rot.transpose() * d_m;
    grad->d_s[p.source] += Vec3(rt_dm(0, 0), rt_dm(1, 1), rt_dm(2, 2));

    const std::array<Mat3, 4> dr_dq = rotation_quat_derivatives(qhat);
    Quat dq;
    for (int c = 0; c < 4; ++c)
      dq[c] = (dr_dq[c].array() * d_rot.array()).sum();
    grad->d_q[p.source] += dq;
  }
  return out;
}

void accumulate_optim_gradient(const Scene& ref_scene, const Scene& posed,
                               const std::vector<PoseJacobian>& jacs,
                               const SceneGradView& view_grad,
                               ParamVector& accum) {
  DS_CHECK(accum.splat_count == ref_scene.size(), Layout,
           "gradient accumulator does not match the scene");
  DS_CHECK(posed.size() == ref_scene.size(), Layout,
           "posed scene does not match the reference scene");
  for (std::size_t i = 0; i < ref_scene.size(); ++i) {
    if (!view_grad.visible[i] && view_grad.d_mu[i].isZero(0.0)) continue;
    const GaussianSplat& ref = ref_scene[i];
    const bool posed_splat =
        !jacs.empty() && ref.binding.has_value() && !ref.decoupled;
    const PoseJacobian identity;
    const PoseJacobian& jac = posed_splat ? jacs[i] : identity;

    double* gp = accum.splat_data(i);

    const Vec3 gmu = jac.position.transpose() * view_grad.d_mu[i];
    for (int k = 0; k < 3; ++k) gp[ParamVector::kMuOffset + k] += gmu[k];

    // Quaternion chain: raw -> normalize -> left-multiply by the relative
    // rotation -> (unit) renderer quaternion.
    const double norm = ref.q.norm();
    const Quat qhat_ref = ref.q / norm;
    const Quat q_t = quat_normalized(quat_multiply(jac.rot_rel_quat, qhat_ref));
    Quat gq = view_grad.d_q[i];
    gq -= q_t * q_t.dot(gq);  // projector at the posed value
    gq = quat_left_matrix(jac.rot_rel_quat).transpose() * gq;
    gq = (gq - qhat_ref * qhat_ref.dot(gq)) / norm;
    for (int k = 0; k < 4; ++k) gp[ParamVector::kQuatOffset + k] += gq[k];

    // s_t = scale_rel * exp(u): dL/du = dL/ds_t * s_t
    const Vec3 s_t = posed[i].s;
    for (int k = 0; k < 3; ++k)
      gp[ParamVector::kScaleOffset + k] += view_grad.d_s[i][k] * s_t[k];

    const double o = ref.opacity;
    gp[ParamVector::kOpacityOffset] += view_grad.d_opacity[i] * o * (1.0 - o);

    for (int k = 0; k < 3; ++k)
      gp[ParamVector::kColorOffset + k] += view_grad.d_color[i][k];

    for (int k = 0; k < ParamVector::kPerSplat; ++k)
      DS_CHECK(std::isfinite(gp[k]), InvalidParameter,
               "non-finite gradient at splat " + std::to_string(i));
  }
}

double add_tracking_offset_gradient(const Scene& ref_scene,
                                    const MeshFrame& ref_mesh, double weight,
                                    ParamVector& accum) {
  std::size_t bound = 0;
  for (const GaussianSplat& g : ref_scene)
    if (g.binding && !g.decoupled) ++bound;
  if (bound == 0) return 0.0;

  double loss = 0.0;
  const double scale = weight / static_cast<double>(bound);
  for (std::size_t i = 0; i < ref_scene.size(); ++i) {
    const GaussianSplat& g = ref_scene[i];
    if (!g.binding || g.decoupled) continue;
    const Vec3 offset = local_offset(g.mu, ref_mesh, *g.binding);
    const Vec3 diff = offset - g.binding->initial_offset;
    loss += diff.squaredNorm();
    const Mat3 jac = local_offset_jacobian(ref_mesh, *g.binding);
    const Vec3 gmu = 2.0 * scale * (jac.transpose() * diff);
    double* gp = accum.splat_data(i);
    for (int k = 0; k < 3; ++k) gp[ParamVector::kMuOffset + k] += gmu[k];
  }
  return scale * loss;
}

double add_anchor_gradient(const Scene& ref_scene, const Scene& anchor_ref,
                           const std::map<std::string, double>& prop_weights,
                           const SplatSelection& free_set, double weight,
                           ParamVector& accum) {
  DS_CHECK(ref_scene.size() == anchor_ref.size(), InvalidParameter,
           "scene and anchor reference are not index-aligned");
  const auto get = [&](const char* key) {
    const auto it = prop_weights.find(key);
    return it != prop_weights.end() ? it->second : 0.0;
  };
  const double w_pos = get("position");
  const double w_trans = get("transform");
  const double w_color = get("color");

  double loss = 0.0;
  for (std::size_t i = 0; i < ref_scene.size(); ++i) {
    const GaussianSplat& g = ref_scene[i];
    const GaussianSplat& r = anchor_ref[i];
    const double splat_scale =
        free_set.contains(static_cast<int>(i)) ? kFreeSetAnchorScale : 1.0;
    const double c = weight * splat_scale;
    loss += splat_scale * (w_pos * (g.mu - r.mu).squaredNorm() +
                           w_trans * ((g.q - r.q).squaredNorm() +
                                      (g.s - r.s).squaredNorm()) +
                           w_color * (g.color - r.color).squaredNorm());

    double* gp = accum.splat_data(i);
    for (int k = 0; k < 3; ++k)
      gp[ParamVector::kMuOffset + k] += c * w_pos * 2.0 * (g.mu[k] - r.mu[k]);
    {
      // The stored g.q is the normalized raw vector; chain the quadratic
      // through that normalization (the raw block is kept unit-norm by the
      // training loop, so the 1/||raw|| factor is 1).
      const Quat diff = 2.0 * c * w_trans * (g.q - r.q);
      const Quat projected = diff - g.q * g.q.dot(diff);
      for (int k = 0; k < 4; ++k)
        gp[ParamVector::kQuatOffset + k] += projected[k];
    }
    for (int k = 0; k < 3; ++k)
      gp[ParamVector::kScaleOffset + k] +=
          c * w_trans * 2.0 * (g.s[k] - r.s[k]) * g.s[k];
    for (int k = 0; k < 3; ++k)
      gp[ParamVector::kColorOffset + k] +=
          c * w_color * 2.0 * (g.color[k] - r.color[k]);
  }
  return weight * loss;
}

BackwardResult backward(const Scene& ref_scene, const MeshFrame* ref_mesh,
                        const std::vector<const MeshFrame*>& view_meshes,
                        const std::vector<BackwardView>& views,
                        const BackwardConfig& config) {
  DS_CHECK(!views.empty(), InvalidParameter, "backward needs at least one view");
  BackwardResult result;
  result.grad.splat_count = ref_scene.size();
  result.grad.values.assign(ref_scene.size() * ParamVector::kPerSplat, 0.0);

  const LossWeights& w = config.weights;
  const double n_views = static_cast<double>(views.size());
  const double rgb_weight = w.lambda_rec / n_views;
  const double ce_weight = config.include_tracking
                               ? (1.0 - w.lambda_rec) * (1.0 - w.lambda_track) / n_views
                               : 0.0;

  GradientMagnitudeMetric default_perceptual;
  const PerceptualMetric* perceptual =
      config.perceptual ? config.perceptual : &default_perceptual;

  for (const BackwardView& view : views) {
    const bool posed_view = view.frame >= 0;
    Scene posed;
    std::vector<PoseJacobian> jacs;
    if (posed_view) {
      DS_CHECK(ref_mesh != nullptr, InvalidParameter,
               "posed views need a reference mesh");
      DS_CHECK(view.frame < static_cast<int>(view_meshes.size()),
               InvalidParameter, "view frame out of range");
      posed = pose_splats(ref_scene, *view_meshes[view.frame]);
      jacs = pose_jacobians(ref_scene, *ref_mesh, *view_meshes[view.frame]);
    } else {
      posed = ref_scene;
    }

    ImageLossSpec spec;
    spec.target = view.target;
    spec.rgb_weight = rgb_weight;
    spec.lambda_rgb = w.lambda_rgb;
    spec.perceptual = perceptual;
    if (config.include_tracking && view.seg_mask) {
      spec.seg_mask = view.seg_mask;
      spec.ce_weight = ce_weight;
    }

    SceneGradView view_grad;
    const ViewLoss vl =
        render_view_backward(posed, *view.camera, spec, &view_grad, config.render);
    result.rgb += vl.rgb / n_views;
    result.track_ce += vl.ce / n_views;
    accumulate_optim_gradient(ref_scene, posed, jacs, view_grad, result.grad);
    result.view_grads.push_back(std::move(view_grad));
  }

  if (config.include_tracking) {
    DS_CHECK(ref_mesh != nullptr, InvalidParameter,
             "tracking term needs a reference mesh");
    const double offset_weight = (1.0 - w.lambda_rec) * w.lambda_track;
    const double scaled = add_tracking_offset_gradient(ref_scene, *ref_mesh,
                                                       offset_weight, result.grad);
    result.track_offset = offset_weight > 0.0 ? scaled / offset_weight : 0.0;
  }

  const double tracking =
      w.lambda_track * result.track_offset + (1.0 - w.lambda_track) * result.track_ce;
  result.total = config.include_tracking
                     ? total_rec_loss(result.rgb, tracking, w.lambda_rec)
                     : w.lambda_rec * result.rgb;
  return result;
}

}  // namespace dsplat
