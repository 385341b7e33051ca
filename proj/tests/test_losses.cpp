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
#include "dsplat/optim/adam.hpp"
#include "dsplat/optim/discriminator.hpp"
#include "dsplat/optim/losses.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"
#include "oracles.hpp"

using namespace dsplat;

TEST_CASE("rgb_loss") {
  GradientMagnitudeMetric proxy;
  Image3 a(8, 8, 0.4);
  SUBCASE("zero on identical images") {
    CHECK(rgb_loss(a, a, 0.9, proxy) == 0.0);
  }
  SUBCASE("pure MSE at lambda 1") {
    Image3 b(8, 8, 0.5);
    CHECK(rgb_loss(a, b, 1.0, proxy) == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("lambda mixes MSE and perceptual") {
    // A constant offset leaves gradients identical, so the perceptual term
    // is 0 and the mix reduces to lambda * MSE.
    Image3 b(8, 8, 0.5);
    CHECK(proxy.compare(a, b) == 0.0);
    CHECK(rgb_loss(a, b, 0.9, proxy) == doctest::Approx(0.9 * 0.01));
  }
  SUBCASE("rejects dimension mismatches") {
    Image3 b(4, 8, 0.5);
    CHECK_THROWS_AS(rgb_loss(a, b, 1.0, proxy), Error);
  }
}

TEST_CASE("perceptual proxy responds to structure, not offsets") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0, 1);
  GradientMagnitudeMetric proxy;
  Image3 a(16, 16);
  for (double& v : a.data) v = unif(rng);
  Image3 shifted = a;
  for (double& v : shifted.data) v = std::min(1.0, v + 0.1);
  Image3 flat(16, 16, 0.5);
  CHECK(proxy.compare(a, flat) > 10.0 * proxy.compare(a, shifted));
}

TEST_CASE("perceptual proxy gradient matches finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0, 1);
  GradientMagnitudeMetric proxy;
  Image3 a(8, 8), b(8, 8);
  for (double& v : a.data) v = unif(rng);
  for (double& v : b.data) v = unif(rng);
  const Image3 grad = proxy.gradient_wrt_second(a, b);
  const double h = 1e-6;
  for (std::size_t i = 0; i < b.data.size(); i += 7) {
    Image3 plus = b, minus = b;
    plus.data[i] += h;
    minus.data[i] -= h;
    const double fd = (proxy.compare(a, plus) - proxy.compare(a, minus)) / (2 * h);
    CHECK(std::abs(fd - grad.data[i]) < 1e-7);
  }
}

TEST_CASE("tracking_loss") {
  const MeshFrame mesh = make_icosphere(1);
  Camera cam = oracle::small_camera(32, 40.0);
  cam.translation = Vec3(0, 0, 4);

  std::mt19937_64 rng(4);
  Scene scene = oracle::random_scene(rng, 20, cam);
  for (auto& g : scene) g.mu = g.mu.normalized() * 1.05;
  scene = bind_splats(scene, mesh);

  RenderConfig rc;
  rc.keep_label_weights = true;
  const Scene posed = pose_splats(scene, mesh);
  const RenderOutput out = render(posed, cam, rc);

  TrackingLossInput in;
  in.scene = &scene;
  in.ref_mesh = &mesh;
  in.rendered = &out;

  SUBCASE("zero for a fresh binding with perfect labels") {
    // Perfect agreement: the target is the renderer's own label argmax...
    // which the soft prediction only matches where it is confident, so use
    // the rendered label map as the target and check the pure mesh term
    // plus near-zero CE on confident pixels is small but the offset term is
    // exactly zero at lambda 1.
    in.segmenter_mask = &out.labels;
    CHECK(tracking_loss(in, 1.0) == doctest::Approx(0.0).epsilon(1e-18));
  }

  SUBCASE("offset drift shows up quadratically") {
    Scene drifted = scene;
    drifted[0].mu += 0.1 * Vec3(1, 0, 0);
    // Only splat 0 moved; with lambda = 1 the loss is the mean squared
    // local-offset drift. The local frame is orthonormal and scaled by the
    // triangle scale k, so a world displacement d contributes (d/k)^2.
    TrackingLossInput in2 = in;
    in2.scene = &drifted;
    const double k =
        triangle_frame(mesh, drifted[0].binding->triangle).scale;
    const double expected = (0.1 / k) * (0.1 / k) / drifted.size();
    CHECK(tracking_loss(in2, 1.0) == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("matches an independent reimplementation on random perturbations") {
    Scene drifted = scene;
    std::uniform_real_distribution<double> unif(-0.05, 0.05);
    for (auto& g : drifted) g.mu += Vec3(unif(rng), unif(rng), unif(rng));
    LabelMap seg(cam.width, cam.height, 0);
    for (int y = 0; y < cam.height; ++y)
      for (int x = 0; x < cam.width; ++x) seg.at(x, y) = (x + y) % 4;
    TrackingLossInput in2 = in;
    in2.scene = &drifted;
    in2.segmenter_mask = &seg;
    const double lambda = 0.5;
    const double got = tracking_loss(in2, lambda);

    // Independent duplicate of the formula.
    double offset = 0.0;
    std::size_t bound = 0;
    for (const auto& g : drifted) {
      const TriangleFrame f = triangle_frame(mesh, g.binding->triangle);
      const Vec3 local = f.rotation.transpose() * (g.mu - f.origin) / f.scale;
      offset += (local - g.binding->initial_offset).squaredNorm();
      ++bound;
    }
    offset /= bound;
    double ce = 0.0;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        const int tau = seg.at(x, y);
        double p = tau < static_cast<int>(out.label_weights.size())
                       ? out.label_weights[tau].at(x, y)
                       : 0.0;
        if (tau == 0) p += out.transmittance.at(x, y);
        ce += -std::log(std::max(p, 1e-4));
      }
    }
    ce /= cam.width * cam.height;
    CHECK(got == doctest::Approx(lambda * offset + (1 - lambda) * ce).epsilon(1e-12));
  }
}

TEST_CASE("gs_anchor_loss") {
  std::mt19937_64 rng(5);
  Camera cam = oracle::small_camera();
  const Scene reference = oracle::random_scene(rng, 10, cam);
  std::map<std::string, double> weights = {
      {"position", 1.0}, {"transform", 1.0}, {"color", 1.0}};
  SplatSelection free_set;

  SUBCASE("zero at the reference") {
    CHECK(gs_anchor_loss(reference, reference, weights, free_set) == 0.0);
  }
  SUBCASE("anchored displacement costs d^2") {
    Scene moved = reference;
    moved[4].mu += Vec3(0.3, 0, 0);
    CHECK(gs_anchor_loss(moved, reference, weights, free_set) ==
          doctest::Approx(0.09).epsilon(1e-12));
  }
  SUBCASE("free-set displacement is down-weighted 100x") {
    Scene moved = reference;
    moved[4].mu += Vec3(0.3, 0, 0);
    free_set.indices = {4};
    free_set.index_set = {4};
    CHECK(gs_anchor_loss(moved, reference, weights, free_set) ==
          doctest::Approx(0.01 * 0.09).epsilon(1e-12));
  }
  SUBCASE("index misalignment is rejected") {
    CHECK_THROWS_AS(gs_anchor_loss(reference, Scene(3), weights, free_set), Error);
  }
}

TEST_CASE("hinge losses") {
  CHECK(hinge_d_loss({1.0}, {-1.0}) == 0.0);
  CHECK(hinge_d_loss({0.0}, {0.0}) == 2.0);
  CHECK(hinge_g_loss({0.3}) == doctest::Approx(-0.3));
  CHECK(hinge_g_loss({1.0, -1.0}) == doctest::Approx(0.0));
  CHECK(hinge_d_loss({2.0, 3.0}, {-2.0}) == 0.0);
}

TEST_CASE("total_rec_loss") {
  CHECK(total_rec_loss(1.0, 2.0, 1.0) == 1.0);
  CHECK(total_rec_loss(1.0, 2.0, 0.0) == 2.0);
  CHECK(total_rec_loss(1.0, 2.0, 0.8) == doctest::Approx(1.2));
}

TEST_CASE("total_edit_loss") {
  CHECK(total_edit_loss(3, 6, 0, 1, 1, 1) == doctest::Approx(3.0));
  CHECK(total_edit_loss(1.5, 99, 99, 1, 0, 0) == doctest::Approx(1.5));
  CHECK(total_edit_loss(1, 1, 1, 2, 1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(total_edit_loss(1, 1, 1, 0, 0, 0), Error);

  // Normalization is invariant to uniform weight scaling.
  const double a = total_edit_loss(0.7, 1.3, -0.2, 1.0, 2.0, 0.5);
  const double b = total_edit_loss(0.7, 1.3, -0.2, 3.0, 6.0, 1.5);
  CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("adam") {
  SUBCASE("zero gradient on a fresh state is the identity") {
    std::vector<double> params = {1.0, -2.0, 3.0};
    AdamState state;
    state.resize(3);
    adam_step(params, {0, 0, 0}, state);
    CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
  }
  SUBCASE("first step is a bias-corrected signed step of size lr") {
    std::vector<double> params = {0.0};
    AdamState state;
    state.resize(1);
    state.schedule = LrSchedule{1e-2, 1e-2, 1};
    adam_step(params, {0.5}, state);
    CHECK(params[0] == doctest::Approx(-1e-2).epsilon(1e-6));
  }
  SUBCASE("100 steps shrink x^2 from x = 1") {
    std::vector<double> params = {1.0};
    AdamState state;
    state.resize(1);
    state.schedule = LrSchedule{1e-2, 1e-2, 1};
    for (int i = 0; i < 100; ++i) adam_step(params, {2.0 * params[0]}, state);
    CHECK(std::abs(params[0]) < 0.5);
  }
  SUBCASE("length mismatches are rejected") {
    std::vector<double> params = {1.0};
    AdamState state;
    state.resize(2);
    CHECK_THROWS_AS(adam_step(params, {0.0}, state), Error);
  }
}

TEST_CASE("lr schedule decays exponentially from 1e-3 to 1e-5") {
  LrSchedule sched{1e-3, 1e-5, 1000};
  CHECK(sched.lr(0) == doctest::Approx(1e-3));
  CHECK(sched.lr(1000) == doctest::Approx(1e-5));
  CHECK(sched.lr(500) == doctest::Approx(1e-4));
  CHECK(sched.lr(2000) == doctest::Approx(1e-5));  // clamped past the budget
}

TEST_CASE("discriminator gradients match finite differences") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0, 1);
  Discriminator critic(27, {16, 8}, 3);
  // Give the zero-initialized output layer some structure first.
  for (std::size_t i = 0; i < critic.params().size(); ++i)
    if (critic.params()[i] == 0.0) critic.params()[i] = 0.05 * unif(rng) + 0.01;

  std::vector<double> input(27);
  for (double& v : input) v = unif(rng);

  std::vector<double> pgrad(critic.param_count(), 0.0);
  std::vector<double> igrad;
  critic.backward(input, 1.0, &pgrad, &igrad);

  const double h = 1e-6;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < critic.param_count(); i += 13) {
    const double saved = critic.params()[i];
    critic.params()[i] = saved + h;
    const double up = critic.forward(input);
    critic.params()[i] = saved - h;
    const double down = critic.forward(input);
    critic.params()[i] = saved;
    const double fd = (up - down) / (2 * h);
    max_rel = std::max(max_rel, std::abs(fd - pgrad[i]) /
                                    std::max({std::abs(fd), std::abs(pgrad[i]), 1e-6}));
  }
  for (std::size_t i = 0; i < input.size(); ++i) {
    std::vector<double> plus = input, minus = input;
    plus[i] += h;
    minus[i] -= h;
    const double fd = (critic.forward(plus) - critic.forward(minus)) / (2 * h);
    max_rel = std::max(max_rel, std::abs(fd - igrad[i]) /
                                    std::max({std::abs(fd), std::abs(igrad[i]), 1e-6}));
  }
  CHECK(max_rel < 1e-4);
}

TEST_CASE("zero-initialized discriminator scores zero and passes no gradient") {
  Discriminator critic(12, {8}, 1);
  std::vector<double> input(12, 0.7);
  CHECK(critic.forward(input) == 0.0);
  std::vector<double> igrad;
  critic.backward(input, 1.0, nullptr, &igrad);
  for (double g : igrad) CHECK(g == 0.0);
}

TEST_CASE("hinge-trained discriminator separates two patch distributions") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.05);
  const int dim = 48;
  const auto sample = [&](double base) {
    std::vector<double> v(dim);
    for (double& x : v) x = base + noise(rng);
    return v;
  };

  Discriminator critic(dim, {32, 16}, 9);
  AdamState adam;
  adam.resize(critic.param_count());
  adam.schedule = LrSchedule{1e-3, 1e-3, 1};

  for (int step = 0; step < 400; ++step) {
    std::vector<double> grad(critic.param_count(), 0.0);
    for (int k = 0; k < 8; ++k) {
      const std::vector<double> real = sample(0.7);
      const std::vector<double> fake = sample(0.3);
      if (1.0 - critic.forward(real) > 0) critic.backward(real, -1.0 / 8, &grad, nullptr);
      if (1.0 + critic.forward(fake) > 0) critic.backward(fake, 1.0 / 8, &grad, nullptr);
    }
    adam_step(critic.params(), grad, adam);
  }

  int correct = 0;
  const int trials = 200;
  for (int k = 0; k < trials; ++k) {
    if (critic.forward(sample(0.7)) > 0) ++correct;
    if (critic.forward(sample(0.3)) < 0) ++correct;
  }
  CHECK(static_cast<double>(correct) / (2 * trials) > 0.95);
}
