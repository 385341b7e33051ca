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

#include <doctest.h>

#include <random>

#include "dsplat/core/check.hpp"
#include "dsplat/io/dataset.hpp"
#include "dsplat/optim/backward.hpp"
#include "dsplat/optim/gradcheck.hpp"
#include "dsplat/rig/binding.hpp"
#include "oracles.hpp"

using namespace dsplat;

TEST_CASE("optimization-space round trip") {
  std::mt19937_64 rng(1);
  Camera cam = oracle::small_camera();
  const Scene scene = oracle::random_scene(rng, 15, cam);
  const ParamVector opt = to_optim_params(scene);
  const Scene back = apply_optim_params(opt, scene);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK((back[i].mu - scene[i].mu).norm() == 0.0);
    CHECK((back[i].q - scene[i].q).norm() < 1e-12);
    CHECK((back[i].s - scene[i].s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(back[i].opacity == doctest::Approx(scene[i].opacity).epsilon(1e-12));
    CHECK(back[i].color == scene[i].color);
  }
}

TEST_CASE("gradient is zero at a perfect reconstruction") {
  std::mt19937_64 rng(2);
  Camera cam = oracle::small_camera();
  const Scene scene = oracle::random_scene(rng, 10, cam);
  const RenderOutput out = render(scene, cam);

  BackwardConfig bw;
  bw.weights.lambda_rgb = 1.0;
  bw.weights.lambda_rec = 1.0;
  BackwardView view;
  view.frame = -1;
  view.camera = &cam;
  view.target = &out.color;
  const BackwardResult res = backward(scene, nullptr, {}, {view}, bw);
  CHECK(res.total == 0.0);
  for (double g : res.grad.values) CHECK(g == 0.0);
}

TEST_CASE("single splat color gradient matches the closed form") {
  // One splat, MSE loss: dL/dc = 2 (C - T) w / N for each covered pixel.
  Camera cam = oracle::small_camera(16, 60.0);
  GaussianSplat g;
  g.mu = Vec3(0, 0, 5);
  g.s = Vec3::Constant(0.4);
  g.opacity = 0.6;
  g.color = Vec3(0.5, 0.5, 0.5);
  const Scene scene = {g};

  Image3 target(16, 16, 0.0);
  BackwardConfig bw;
  bw.weights.lambda_rgb = 1.0;
  bw.weights.lambda_rec = 1.0;
  BackwardView view;
  view.frame = -1;
  view.camera = &cam;
  view.target = &target;
  const BackwardResult res = backward(scene, nullptr, {}, {view}, bw);

  RenderConfig rc;
  rc.record_floor = 0.0;
  const RenderOutput out = render(scene, cam, rc);
  double expected = 0.0;
  const double n = 16.0 * 16.0 * 3.0;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (const Contribution& c : out.records_at(x, y))
        expected += 2.0 / n * (out.color.at(x, y)[0] - 0.0) * c.weight;
  CHECK(res.grad.values[ParamVector::kColorOffset] ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("gradcheck on a small batch stays within tolerance") {
  GradCheckConfig cfg;
  cfg.seed = 5;
  cfg.scenes = 3;
  cfg.splats = 10;
  const GradCheckReport report = run_gradcheck(cfg);
  CHECK(report.pass);
  CHECK(report.overall < 1e-3);
}

TEST_CASE("posed-scene gradients match finite differences") {
  // The full chain through binding, posing, projection and compositing.
  std::mt19937_64 rng(7);
  const MeshFrame mesh = make_icosphere(1);
  MeshFrame deformed = mesh;
  for (Vec3& v : deformed.vertices) {
    v.x() *= 1.2;
    if (v.y() < 0) v += 0.15 * v.normalized();
  }

  Camera cam = oracle::small_camera(24, 40.0);
  cam.translation = Vec3(0, 0, 4);
  Scene scene = oracle::random_scene(rng, 8, cam);
  for (auto& g : scene) {
    g.mu = g.mu.normalized() * (1.0 + 0.05 * (rng() % 7));
    g.s = Vec3::Constant(0.15);
  }
  scene = bind_splats(scene, mesh);
  scene[3].decoupled = true;

  std::uniform_real_distribution<double> unif(0, 1);
  Image3 target(cam.width, cam.height);
  for (double& v : target.data) v = unif(rng);
  LabelMap seg(cam.width, cam.height, 0);
  for (int y = 0; y < cam.height; ++y)
    for (int x = 0; x < cam.width; ++x) seg.at(x, y) = (x * 7 + y) % 4;

  BackwardConfig bw;
  bw.weights.lambda_rgb = 0.9;
  bw.weights.lambda_rec = 0.8;
  bw.weights.lambda_track = 0.5;
  bw.include_tracking = true;
  std::vector<const MeshFrame*> meshes = {&deformed};
  BackwardView view;
  view.frame = 0;
  view.camera = &cam;
  view.target = &target;
  view.seg_mask = &seg;

  const BackwardResult res = backward(scene, &mesh, meshes, {view}, bw);
  const ParamVector opt = to_optim_params(scene);
  double gnorm = 0.0;
  for (double g : res.grad.values) gnorm = std::max(gnorm, std::abs(g));
  const double floor = std::max(1e-8, 1e-3 * gnorm);

  ParamVector probe = opt;
  const double h = 1e-4;
  double max_rel = 0.0;
  for (std::size_t k = 0; k < probe.values.size(); k += 3) {
    const double saved = probe.values[k];
    const auto loss_at = [&](double value) {
      probe.values[k] = value;
      Scene s = apply_optim_params(probe, scene);
      update_local_coords(s, mesh);
      return backward(s, &mesh, meshes, {view}, bw).total;
    };
    const double fd = (loss_at(saved + h) - loss_at(saved - h)) / (2 * h);
    probe.values[k] = saved;
    const double an = res.grad.values[k];
    max_rel = std::max(max_rel, std::abs(fd - an) /
                                    std::max({std::abs(fd), std::abs(an), floor}));
  }
  CHECK(max_rel < 2e-3);
}

TEST_CASE("anchor gradient matches finite differences") {
  std::mt19937_64 rng(8);
  Camera cam = oracle::small_camera();
  Scene scene = oracle::random_scene(rng, 6, cam);
  const Scene reference = oracle::random_scene(rng, 6, cam);
  SplatSelection free_set;
  free_set.indices = {2};
  free_set.index_set = {2};
  const std::map<std::string, double> weights = {
      {"position", 1.0}, {"transform", 0.7}, {"color", 0.4}};

  ParamVector grad;
  grad.splat_count = scene.size();
  grad.values.assign(scene.size() * ParamVector::kPerSplat, 0.0);
  add_anchor_gradient(scene, reference, weights, free_set, 0.35, grad);

  ParamVector opt = to_optim_params(scene);
  const double h = 1e-5;
  for (std::size_t k = 0; k < opt.values.size(); k += 2) {
    const double saved = opt.values[k];
    const auto loss_at = [&](double value) {
      opt.values[k] = value;
      const Scene s = apply_optim_params(opt, scene);
      return 0.35 * gs_anchor_loss(s, reference, weights, free_set);
    };
    const double fd = (loss_at(saved + h) - loss_at(saved - h)) / (2 * h);
    opt.values[k] = saved;
    CHECK(std::abs(fd - grad.values[k]) <
          1e-6 * std::max(1.0, std::abs(grad.values[k])));
  }
}

TEST_CASE("tracking offset gradient matches finite differences") {
  std::mt19937_64 rng(9);
  const MeshFrame mesh = make_icosphere(1);
  Camera cam = oracle::small_camera();
  Scene scene = oracle::random_scene(rng, 6, cam);
  for (auto& g : scene) g.mu = g.mu.normalized() * 1.1;
  scene = bind_splats(scene, mesh);
  std::uniform_real_distribution<double> unif(-0.05, 0.05);
  for (auto& g : scene) g.mu += Vec3(unif(rng), unif(rng), unif(rng));

  ParamVector grad;
  grad.splat_count = scene.size();
  grad.values.assign(scene.size() * ParamVector::kPerSplat, 0.0);
  const double loss = add_tracking_offset_gradient(scene, mesh, 0.6, grad);
  CHECK(loss > 0.0);

  ParamVector opt = to_optim_params(scene);
  const double h = 1e-6;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t idx = i * ParamVector::kPerSplat + k;
      ParamVector probe = opt;
      probe.values[idx] += h;
      Scene plus = apply_optim_params(probe, scene);
      probe.values[idx] -= 2 * h;
      Scene minus = apply_optim_params(probe, scene);
      ParamVector dummy;
      dummy.splat_count = scene.size();
      dummy.values.assign(grad.values.size(), 0.0);
      const double up = add_tracking_offset_gradient(plus, mesh, 0.6, dummy);
      const double down = add_tracking_offset_gradient(minus, mesh, 0.6, dummy);
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - grad.values[idx]) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("backward flags non-finite parameters with the splat index") {
  Camera cam = oracle::small_camera();
  GaussianSplat g;
  g.mu = Vec3(0, 0, 5);
  g.s = Vec3::Constant(0.3);
  g.opacity = 0.5;
  Scene scene = {g};
  scene[0].color = Vec3(std::nan(""), 0.5, 0.5);

  Image3 target(cam.width, cam.height, 0.2);
  BackwardConfig bw;
  BackwardView view;
  view.frame = -1;
  view.camera = &cam;
  view.target = &target;
  CHECK_THROWS_WITH_AS(backward(scene, nullptr, {}, {view}, bw),
                       doctest::Contains("splat 0"), Error);
}
