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

#include "dsplat/optim/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "dsplat/core/check.hpp"
#include "dsplat/io/splat_file.hpp"
#include "dsplat/rig/binding.hpp"
#include "dsplat/rig/labels.hpp"

namespace dsplat {

namespace fs = std::filesystem;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Keeps the raw quaternion blocks unit-norm so the normalization chain in
// the backward pass stays exact.
void renormalize_quaternions(ParamVector& opt) {
  for (std::size_t i = 0; i < opt.splat_count; ++i) {
    double* q = opt.splat_data(i) + ParamVector::kQuatOffset;
    const double n =
        std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (n > 0.0 && std::abs(n - 1.0) > 1e-12)
      for (int k = 0; k < 4; ++k) q[k] /= n;
  }
}

struct CsvLog {
  std::ofstream out;

  void open(const std::string& path, const std::string& header) {
    out.open(path, std::ios::trunc);
    DS_CHECK(out.good(), Io, "cannot open log file: " + path);
    out << header << "\n";
  }
  template <typename... Args>
  void row(Args&&... args) {
    if (!out.is_open()) return;
    bool first = true;
    ((out << (first ? (first = false, "") : ",") << args), ...);
    out << "\n";
  }
};

}  // namespace

Scene init_scene_from_mesh(const MeshFrame& mesh) {
  mesh.validate();
  Scene scene;
  scene.reserve(mesh.triangles.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const TriangleFrame f = triangle_frame(mesh, t);
    GaussianSplat g;
    g.mu = f.origin;
    g.q = matrix_to_quat(f.rotation);
    g.s = Vec3::Constant(0.5 * f.scale);
    g.opacity = 0.5;
    g.color = Vec3::Constant(0.5);
    scene.push_back(g);
  }
  return bind_splats(scene, mesh);
}

FitResult fit_modeling_stage(const Dataset& dataset, const FitConfig& config) {
  DS_CHECK(dataset.n_frames() > 0 && dataset.n_cameras() > 0, InvalidParameter,
           "empty dataset");
  const MeshFrame& ref_mesh = dataset.frames.front();

  std::vector<int> train_cams;
  for (int c = 0; c < dataset.n_cameras(); ++c)
    if (c != config.holdout_camera) train_cams.push_back(c);
  DS_CHECK(!train_cams.empty(), Config, "holdout leaves no training cameras");

  // Targets are small at desk scale; keep them in memory.
  std::vector<std::vector<Image3>> targets(dataset.n_frames());
  std::vector<std::vector<LabelMap>> segs(dataset.n_frames());
  for (int f = 0; f < dataset.n_frames(); ++f) {
    for (int c = 0; c < dataset.n_cameras(); ++c) {
      targets[f].push_back(dataset.image(f, c));
      if (dataset.has_labels()) segs[f].push_back(dataset.labels(f, c));
    }
  }

  Scene base = init_scene_from_mesh(ref_mesh);
  const auto relabel = [&](Scene& scene) {
    if (!dataset.has_labels()) return;
    std::vector<LabelMap> maps;
    std::vector<Camera> cams;
    for (int c : train_cams) {
      maps.push_back(segs[0][c]);
      cams.push_back(dataset.cameras[c]);
    }
    scene = assign_labels(scene, maps, cams);
  };
  relabel(base);

  ParamVector opt = to_optim_params(base);
  AdamState adam;
  adam.resize(opt.values.size());
  adam.schedule = config.schedule;

  DensifyStats stats;
  stats.resize(base.size());
  DensifyConfig densify = config.densify;
  densify.max_splats = config.max_splats;

  std::mt19937_64 rng(config.seed);
  std::mt19937_64 densify_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  CsvLog log;
  std::string log_path, checkpoint_path;
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    log_path = (fs::path(config.out_dir) / "train_log.csv").string();
    log.open(log_path,
             "# stage=modeling lambda_rgb=" + std::to_string(config.weights.lambda_rgb) +
                 " lambda_track=" + std::to_string(config.weights.lambda_track) +
                 " lambda_rec=" + std::to_string(config.weights.lambda_rec) +
                 "\niteration,total,rgb,track_offset,track_ce,lr,n_splats");
    checkpoint_path = (fs::path(config.out_dir) / "scene.dsplat").string();
  }

  BackwardConfig bw;
  bw.weights = config.weights;
  bw.include_tracking = config.include_tracking && dataset.has_labels();

  const auto checkpoint = [&](const Scene& scene) {
    if (config.out_dir.empty()) return;
    save_scene(checkpoint_path, scene);
    save_adam_state((fs::path(config.out_dir) / "scene.adam").string(), adam);
  };

  Scene scene = base;
  FitResult result;
  std::int64_t it = 0;
  for (; it < config.iterations; ++it) {
    if (config.stop_requested && config.stop_requested->load()) break;

    const int frame = static_cast<int>(rng() % dataset.n_frames());
    const int cam = train_cams[rng() % train_cams.size()];

    std::vector<const MeshFrame*> meshes;
    for (const MeshFrame& m : dataset.frames) meshes.push_back(&m);
    BackwardView view;
    view.frame = frame;
    view.camera = &dataset.cameras[cam];
    view.target = &targets[frame][cam];
    if (bw.include_tracking) view.seg_mask = &segs[frame][cam];

    const BackwardResult res = backward(scene, &ref_mesh, meshes, {view}, bw);
    if (!std::isfinite(res.total)) {
      checkpoint(scene);
      throw Error(ErrorKind::InvalidParameter,
                  "non-finite loss at iteration " + std::to_string(it));
    }
    result.final_loss = res.total;

    // Density-control statistics from this view.
    const SceneGradView& vg = res.view_grads.front();
    for (std::size_t i = 0; i < scene.size(); ++i) {
      if (!vg.visible[i]) continue;
      stats.grad_accum[i] += vg.screen_grad[i];
      stats.seen[i] += 1;
      stats.max_radius[i] = std::max(stats.max_radius[i], vg.radius_px[i]);
    }

    if (max_abs(res.grad.values) > 0.0) {
      adam_step(opt.values, res.grad.values, adam);
      renormalize_quaternions(opt);
      scene = apply_optim_params(opt, scene);
      update_local_coords(scene, ref_mesh);
    } else {
      adam.step += 1;  // keep the schedule position
    }

    if (config.log_every > 0 && it % config.log_every == 0)
      log.row(it, res.total, res.rgb, res.track_offset, res.track_ce,
              config.schedule.lr(it), scene.size());

    const std::int64_t next = it + 1;
    if (next % densify.interval == 0 && next < config.iterations) {
      stats.iteration = next;
      densify.scene_extent = dataset.scene_extent;
      scene = densify_and_prune(scene, stats, densify, densify_rng, &ref_mesh);
      relabel(scene);
      opt = to_optim_params(scene);
      adam.resize(opt.values.size());  // moments restart after topology changes
      adam.step = next;
    }
    if (config.checkpoint_every > 0 && next % config.checkpoint_every == 0)
      checkpoint(scene);
  }

  relabel(scene);
  checkpoint(scene);
  result.scene = scene;
  result.iterations_run = it;
  result.checkpoint_path = checkpoint_path;
  result.log_path = log_path;
  return result;
}

EditResult fit_editing_stage(const Scene& pre_edit, const MeshFrame& ref_mesh,
                             const std::vector<MeshFrame>& frames,
                             const std::vector<Camera>& cameras,
                             const SplatSelection& selection,
                             const std::vector<EditNode>& nodes,
                             const EditConfig& config) {
  DS_CHECK(!selection.empty(), InvalidParameter, "empty edit selection");
  DS_CHECK(!nodes.empty(), InvalidParameter, "no edit nodes given");
  for (const EditNode& n : nodes) {
    DS_CHECK(n.frame >= 0 && n.frame < static_cast<int>(frames.size()),
             InvalidParameter, "edit node frame out of range");
    DS_CHECK(n.camera >= 0 && n.camera < static_cast<int>(cameras.size()),
             InvalidParameter, "edit node camera out of range");
  }

  ParamVector opt = to_optim_params(pre_edit);
  AdamState adam;
  adam.resize(opt.values.size());
  adam.schedule = config.schedule;

  const int patch = config.patch_size;
  Discriminator critic(patch * patch * 3, {128, 64}, config.seed ^ 0xd1);
  AdamState critic_adam;
  critic_adam.resize(critic.param_count());
  critic_adam.schedule = LrSchedule{config.discriminator_lr,
                                    config.discriminator_lr, 1};

  // Candidate patch centers per node (inside the edit region, full patch in
  // frame).
  std::vector<std::vector<std::pair<int, int>>> centers(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const Mask& m = nodes[n].region;
    const int half = patch / 2;
    for (int y = half; y + half <= m.height; ++y)
      for (int x = half; x + half <= m.width; ++x)
        if (m.at(x, y)) centers[n].emplace_back(x, y);
  }

  std::mt19937_64 rng(config.seed);

  CsvLog log;
  std::string log_path, checkpoint_path;
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    log_path = (fs::path(config.out_dir) / "edit_log.csv").string();
    log.open(log_path,
             "# stage=editing lambda_rgb=" + std::to_string(config.weights.lambda_rgb) +
                 " edit_weights=" + std::to_string(config.weights.edit_rgb) + "/" +
                 std::to_string(config.weights.edit_gs) + "/" +
                 std::to_string(config.weights.edit_gan) +
                 "\niteration,total,rgb,gs,gan,d_loss,lr,n_splats");
    checkpoint_path = (fs::path(config.out_dir) / "edited.dsplat").string();
  }

  const double l1 = config.weights.edit_rgb;
  const double l2 = config.weights.edit_gs;
  const double l3 = config.weights.edit_gan;
  const double lsum = l1 + l2 + l3;
  DS_CHECK(lsum > 0.0, InvalidParameter, "edit-loss weights must not all be zero");

  GradientMagnitudeMetric perceptual;
  const auto extract_patch = [&](const Image3& img, int cx, int cy) {
    std::vector<double> out(static_cast<std::size_t>(patch) * patch * 3);
    const int half = patch / 2;
    std::size_t k = 0;
    for (int y = cy - half; y < cy - half + patch; ++y)
      for (int x = cx - half; x < cx - half + patch; ++x)
        for (int c = 0; c < 3; ++c) out[k++] = img.px(x, y)[c];
    return out;
  };

  Scene scene = pre_edit;
  EditResult result;
  std::int64_t it = 0;
  for (; it < config.iterations; ++it) {
    if (config.stop_requested && config.stop_requested->load()) break;

    const EditNode& node = nodes[it % nodes.size()];
    const Scene posed = pose_splats(scene, frames[node.frame]);
    const std::vector<PoseJacobian> jacs =
        pose_jacobians(scene, ref_mesh, frames[node.frame]);
    const Camera& cam = cameras[node.camera];

    RenderConfig rc;
    rc.keep_records = false;
    const RenderOutput current = render_prepared(prepare_scene(posed, cam, rc), rc);

    // Paired patch positions for this iteration.
    const auto& cands = centers[it % nodes.size()];
    std::vector<std::pair<int, int>> picks;
    for (int k = 0; k < config.patches_per_step && !cands.empty(); ++k)
      picks.push_back(cands[rng() % cands.size()]);

    // Discriminator steps: real = edited targets, fake = current renders.
    double d_loss = 0.0;
    for (int dstep = 0; dstep < config.discriminator_steps && !picks.empty();
         ++dstep) {
      std::vector<double> dgrad(critic.param_count(), 0.0);
      std::vector<double> real_scores, fake_scores;
      const double inv_k = 1.0 / picks.size();
      for (const auto& [cx, cy] : picks) {
        const std::vector<double> real = extract_patch(node.target, cx, cy);
        const std::vector<double> fake = extract_patch(current.color, cx, cy);
        const double sr = critic.forward(real);
        const double sf = critic.forward(fake);
        real_scores.push_back(sr);
        fake_scores.push_back(sf);
        if (1.0 - sr > 0.0) critic.backward(real, -inv_k, &dgrad, nullptr);
        if (1.0 + sf > 0.0) critic.backward(fake, inv_k, &dgrad, nullptr);
      }
      d_loss = hinge_d_loss(real_scores, fake_scores);
      if (max_abs(dgrad) > 0.0) adam_step(critic.params(), dgrad, critic_adam);
    }

    // Generator term: -mean D(render patches), adjoint seeded into dL/dC.
    double g_loss = 0.0;
    Image3 gan_adjoint(cam.width, cam.height, 0.0);
    if (!picks.empty() && l3 > 0.0) {
      const double inv_k = 1.0 / picks.size();
      const int half = patch / 2;
      for (const auto& [cx, cy] : picks) {
        const std::vector<double> fake = extract_patch(current.color, cx, cy);
        std::vector<double> igrad;
        const double s =
            critic.backward(fake, -(l3 / lsum) * inv_k, nullptr, &igrad);
        g_loss += -s * inv_k;
        std::size_t k = 0;
        for (int y = cy - half; y < cy - half + patch; ++y)
          for (int x = cx - half; x < cx - half + patch; ++x)
            for (int c = 0; c < 3; ++c) gan_adjoint.px(x, y)[c] += igrad[k++];
      }
    }

    ImageLossSpec spec;
    spec.target = &node.target;
    spec.rgb_weight = l1 / lsum;
    spec.lambda_rgb = config.weights.lambda_rgb;
    spec.perceptual = &perceptual;
    spec.extra_color_adjoint = &gan_adjoint;

    SceneGradView vg;
    const ViewLoss vl = render_view_backward(posed, cam, spec, &vg, rc);

    ParamVector grad;
    grad.splat_count = scene.size();
    grad.values.assign(opt.values.size(), 0.0);
    accumulate_optim_gradient(scene, posed, jacs, vg, grad);
    const double gs_raw = add_anchor_gradient(scene, pre_edit,
                                              config.weights.lambda_gs,
                                              selection, l2 / lsum, grad) /
                          (l2 > 0.0 ? l2 / lsum : 1.0);

    const double total = total_edit_loss(vl.rgb, gs_raw, g_loss, l1, l2, l3);
    if (!std::isfinite(total)) {
      if (!checkpoint_path.empty()) save_scene(checkpoint_path, scene);
      throw Error(ErrorKind::InvalidParameter,
                  "non-finite loss at iteration " + std::to_string(it));
    }
    result.final_loss = total;

    if (max_abs(grad.values) > 0.0) {
      adam_step(opt.values, grad.values, adam);
      renormalize_quaternions(opt);
      scene = apply_optim_params(opt, scene);
      update_local_coords(scene, ref_mesh);
    } else {
      adam.step += 1;
    }

    if (config.log_every > 0 && it % config.log_every == 0)
      log.row(it, total, vl.rgb, gs_raw, g_loss, d_loss,
              config.schedule.lr(it), scene.size());
  }

  if (!checkpoint_path.empty()) save_scene(checkpoint_path, scene);
  result.scene = scene;
  result.iterations_run = it;
  result.checkpoint_path = checkpoint_path;
  result.log_path = log_path;
  return result;
}

namespace {
constexpr char kAdamMagic[8] = {'D', 'S', 'A', 'D', 'A', 'M', '\0', '\x01'};
}

void save_adam_state(const std::string& path, const AdamState& state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  DS_CHECK(out.good(), Io, "cannot open optimizer sidecar: " + path);
  out.write(kAdamMagic, 8);
  const std::uint64_t n = state.m.size();
  const auto put = [&](const void* p, std::size_t size) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(size));
  };
  put(&n, sizeof(n));
  put(&state.step, sizeof(state.step));
  put(&state.schedule.lr_start, sizeof(double));
  put(&state.schedule.lr_end, sizeof(double));
  put(&state.schedule.total_steps, sizeof(std::int64_t));
  put(state.m.data(), n * sizeof(double));
  put(state.v.data(), n * sizeof(double));
  DS_CHECK(out.good(), Io, "short write: " + path);
}

AdamState load_adam_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  DS_CHECK(in.good(), Io, "cannot open optimizer sidecar: " + path);
  char magic[8];
  in.read(magic, 8);
  DS_CHECK(in.good() && std::memcmp(magic, kAdamMagic, 8) == 0, Io,
           "not an optimizer sidecar: " + path);
  AdamState state;
  std::uint64_t n = 0;
  const auto get = [&](void* p, std::size_t size) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(size));
    DS_CHECK(in.good(), Io, "truncated optimizer sidecar: " + path);
  };
  get(&n, sizeof(n));
  get(&state.step, sizeof(state.step));
  get(&state.schedule.lr_start, sizeof(double));
  get(&state.schedule.lr_end, sizeof(double));
  get(&state.schedule.total_steps, sizeof(std::int64_t));
  state.m.resize(n);
  state.v.resize(n);
  get(state.m.data(), n * sizeof(double));
  get(state.v.data(), n * sizeof(double));
  return state;
}

}  // namespace dsplat
