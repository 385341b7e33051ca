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

#include <map>
#include <random>

#include "dsplat/core/check.hpp"
#include "dsplat/core/gaussian.hpp"
#include "dsplat/io/dataset.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"
#include "dsplat/rig/densify.hpp"
#include "dsplat/rig/labels.hpp"
#include "dsplat/rig/mesh.hpp"
#include "oracles.hpp"

using namespace dsplat;

namespace {

// Right triangle in the xy-plane with area 1 (legs sqrt(2)).
MeshFrame unit_area_triangle() {
  MeshFrame mesh;
  const double leg = std::sqrt(2.0);
  mesh.vertices = {Vec3(0, 0, 0), Vec3(leg, 0, 0), Vec3(0, leg, 0)};
  mesh.triangles = {{0, 1, 2}};
  return mesh;
}

MeshFrame transformed(const MeshFrame& mesh, const Mat3& rot, const Vec3& shift,
                      double scale = 1.0) {
  MeshFrame out = mesh;
  for (Vec3& v : out.vertices) v = rot * (scale * v) + shift;
  return out;
}

Scene random_bound_scene(std::mt19937_64& rng, const MeshFrame& mesh, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Scene scene;
  for (int i = 0; i < n; ++i) {
    GaussianSplat g;
    g.mu = Vec3(gauss(rng), gauss(rng), gauss(rng)) * 1.2;
    Quat q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    g.q = q / q.norm();
    g.s = Vec3(0.05 + 0.2 * unif(rng), 0.05 + 0.2 * unif(rng),
               0.05 + 0.2 * unif(rng));
    g.opacity = unif(rng);
    g.color = Vec3(unif(rng), unif(rng), unif(rng));
    g.label = 1 + static_cast<int>(rng() % 3);
    scene.push_back(g);
  }
  return bind_splats(scene, mesh);
}

}  // namespace

TEST_CASE("triangle_frame basics") {
  const MeshFrame mesh = unit_area_triangle();
  const TriangleFrame f = triangle_frame(mesh, 0);
  CHECK((f.rotation.col(2) - Vec3(0, 0, 1)).norm() < 1e-12);
  CHECK(f.scale == doctest::Approx(1.0));
  CHECK((f.origin - Vec3(std::sqrt(2.0) / 3, std::sqrt(2.0) / 3, 0)).norm() <
        1e-12);
  CHECK((f.rotation * f.rotation.transpose() - Mat3::Identity()).norm() < 1e-12);
}

TEST_CASE("triangle_frame scales with sqrt(area) and tracks rotations") {
  const MeshFrame mesh = unit_area_triangle();
  const TriangleFrame base = triangle_frame(mesh, 0);

  const MeshFrame doubled = transformed(mesh, Mat3::Identity(), Vec3::Zero(), 2.0);
  const TriangleFrame f2 = triangle_frame(doubled, 0);
  CHECK(f2.scale == doctest::Approx(2.0 * base.scale));
  CHECK((f2.rotation - base.rotation).norm() < 1e-12);

  const Mat3 rot =
      Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  const TriangleFrame fr =
      triangle_frame(transformed(mesh, rot, Vec3(1, -2, 0.5)), 0);
  CHECK((fr.rotation - rot * base.rotation).norm() < 1e-9);
}

TEST_CASE("triangle_frame rejects degenerate triangles") {
  MeshFrame mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  mesh.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(triangle_frame(mesh, 0), Error);
}

TEST_CASE("bind_splats records barycenter and normal offset") {
  const MeshFrame mesh = unit_area_triangle();
  const TriangleFrame f = triangle_frame(mesh, 0);

  GaussianSplat g;
  g.mu = f.origin;
  Scene bound = bind_splats({g}, mesh);
  REQUIRE(bound[0].binding.has_value());
  CHECK((bound[0].binding->bary - Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)).norm() < 1e-9);
  CHECK(bound[0].binding->normal_offset == doctest::Approx(0.0).epsilon(1e-12));

  g.mu = f.origin + 0.1 * f.rotation.col(2);
  bound = bind_splats({g}, mesh);
  CHECK(bound[0].binding->normal_offset == doctest::Approx(0.1));
}

TEST_CASE("bind then pose on the same frame is the identity") {
  std::mt19937_64 rng(4);
  const MeshFrame mesh = make_icosphere(1);
  const Scene scene = random_bound_scene(rng, mesh, 60);
  const Scene posed = pose_splats(scene, mesh);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK((posed[i].mu - scene[i].mu).norm() < 1e-9);
    CHECK(std::min((posed[i].q - scene[i].q).norm(),
                   (posed[i].q + scene[i].q).norm()) < 1e-9);
    CHECK((posed[i].s - scene[i].s).norm() < 1e-9);
    CHECK(posed[i].label == scene[i].label);
    CHECK(posed[i].color == scene[i].color);
  }
}

TEST_CASE("pose_splats translates rigidly") {
  std::mt19937_64 rng(5);
  const MeshFrame mesh = make_icosphere(1);
  const Scene scene = random_bound_scene(rng, mesh, 40);
  const Vec3 shift(0.5, -1.25, 2.0);
  const MeshFrame moved = transformed(mesh, Mat3::Identity(), shift);
  const Scene posed = pose_splats(scene, moved);
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK((posed[i].mu - (scene[i].mu + shift)).norm() < 1e-9);
    CHECK((posed[i].s - scene[i].s).norm() < 1e-12);
  }
}

TEST_CASE("pose_splats is rigid-motion equivariant") {
  std::mt19937_64 rng(6);
  const MeshFrame mesh = make_icosphere(1);
  const Scene scene = random_bound_scene(rng, mesh, 40);
  const Mat3 rot =
      Eigen::AngleAxisd(1.1, Vec3(0.2, -1, 0.4).normalized()).toRotationMatrix();
  const Vec3 shift(0.3, 0.7, -0.2);
  const Scene posed = pose_splats(scene, transformed(mesh, rot, shift));
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK((posed[i].mu - (rot * scene[i].mu + shift)).norm() < 1e-9);
    const Mat3 expected = rot * quat_to_matrix(scene[i].q);
    CHECK((quat_to_matrix(posed[i].q) - expected).norm() < 1e-9);
  }
}

TEST_CASE("uniform mesh scaling scales bound splats") {
  std::mt19937_64 rng(7);
  const MeshFrame mesh = make_icosphere(1);
  const Scene scene = random_bound_scene(rng, mesh, 40);
  const Scene posed =
      pose_splats(scene, transformed(mesh, Mat3::Identity(), Vec3::Zero(), 2.0));
  for (std::size_t i = 0; i < scene.size(); ++i) {
    CHECK((posed[i].mu - 2.0 * scene[i].mu).norm() < 1e-9);
    CHECK((posed[i].s - 2.0 * scene[i].s).norm() < 1e-9);
  }
}

TEST_CASE("pose_splats leaves decoupled splats untouched") {
  std::mt19937_64 rng(8);
  const MeshFrame mesh = make_icosphere(1);
  Scene scene = random_bound_scene(rng, mesh, 5);
  scene[2].decoupled = true;
  const Scene posed =
      pose_splats(scene, transformed(mesh, Mat3::Identity(), Vec3(9, 9, 9)));
  CHECK(posed[2].mu == scene[2].mu);
  CHECK((posed[0].mu - (scene[0].mu + Vec3(9, 9, 9))).norm() < 1e-9);
}

TEST_CASE("pose_splats rejects bindings outside the mesh") {
  std::mt19937_64 rng(9);
  const MeshFrame mesh = make_icosphere(1);
  Scene scene = random_bound_scene(rng, mesh, 3);
  scene[0].binding->triangle = 5000;
  CHECK_THROWS_AS(pose_splats(scene, mesh), Error);
}

TEST_CASE("bind_splats rejects an empty mesh") {
  CHECK_THROWS_AS(bind_splats(Scene(1), MeshFrame{}), Error);
}

TEST_CASE("pose_jacobians matches finite differences of the posing map") {
  std::mt19937_64 rng(10);
  const MeshFrame mesh = make_icosphere(1);
  Scene scene = random_bound_scene(rng, mesh, 12);
  // A non-rigid target frame: lateral stretch plus a lower-half bulge.
  MeshFrame target = mesh;
  for (Vec3& v : target.vertices) {
    v.x() *= 1.15;
    if (v.y() < 0) v += 0.2 * v.normalized();
  }
  const std::vector<PoseJacobian> jacs = pose_jacobians(scene, mesh, target);
  const double h = 1e-6;
  for (std::size_t i = 0; i < scene.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      Scene plus = scene, minus = scene;
      plus[i].mu[k] += h;
      minus[i].mu[k] -= h;
      update_local_coords(plus, mesh);
      update_local_coords(minus, mesh);
      const Vec3 fd = (pose_splats(plus, target)[i].mu -
                       pose_splats(minus, target)[i].mu) /
                      (2 * h);
      CHECK((fd - jacs[i].position.col(k)).norm() < 1e-6);
    }
    CHECK(jacs[i].scale_rel ==
          doctest::Approx(pose_splats(scene, target)[i].s[0] / scene[i].s[0]));
  }
}

TEST_CASE("densify_and_prune") {
  const MeshFrame mesh = make_icosphere(1);
  std::mt19937_64 rng(11);
  Scene scene = random_bound_scene(rng, mesh, 20);
  for (auto& g : scene) g.opacity = 0.8;

  DensifyConfig cfg;
  cfg.scene_extent = 2.0;
  DensifyStats stats;
  stats.resize(scene.size());

  SUBCASE("no-op when gradients are low and opacities high") {
    stats.iteration = 2048;
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    CHECK(out.size() == scene.size());
  }

  SUBCASE("clone grows the scene by one and keeps the label") {
    stats.iteration = 2048;
    scene[3].s = Vec3::Constant(0.01);  // small -> clone
    stats.grad_accum[3] = 1.0;
    stats.seen[3] = 1;
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    CHECK(out.size() == scene.size() + 1);
    CHECK(out[3].label == scene[3].label);
    CHECK(out[4].label == scene[3].label);
  }

  SUBCASE("split replaces the parent with two smaller children") {
    stats.iteration = 4096;
    scene[3].s = Vec3::Constant(0.1);  // large -> split
    stats.grad_accum[3] = 1.0;
    stats.seen[3] = 1;
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    CHECK(out.size() == scene.size() + 1);
    CHECK(out[3].s[0] == doctest::Approx(0.1 / 1.6));
    CHECK(out[4].s[0] == doctest::Approx(0.1 / 1.6));
    CHECK(out[3].label == scene[3].label);
  }

  SUBCASE("prunes transparent splats") {
    stats.iteration = 2048;
    scene[5].opacity = 0.001;
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    CHECK(out.size() == scene.size() - 1);
  }

  SUBCASE("label multiset is conserved up to prunes and inherited children") {
    stats.iteration = 2048;
    scene[2].opacity = 0.0001;
    scene[7].s = Vec3::Constant(0.01);
    stats.grad_accum[7] = 1.0;
    stats.seen[7] = 1;
    std::map<int, int> before, after;
    for (const auto& g : scene) ++before[g.label];
    --before[scene[2].label];  // pruned
    ++before[scene[7].label];  // cloned child
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    for (const auto& g : out) ++after[g.label];
    CHECK(before == after);
  }

  SUBCASE("honors the max splat cap") {
    stats.iteration = 2048;
    cfg.max_splats = scene.size() + 1;
    for (std::size_t i = 0; i < scene.size(); ++i) {
      stats.grad_accum[i] = 1.0;
      stats.seen[i] = 1;
    }
    const Scene out = densify_and_prune(scene, stats, cfg, rng, &mesh);
    CHECK(out.size() <= cfg.max_splats);
  }

  SUBCASE("rejects off-cadence calls") {
    stats.iteration = 1000;
    CHECK_THROWS_AS(densify_and_prune(scene, stats, cfg, rng, &mesh), Error);
  }
}

TEST_CASE("assign_labels majority vote") {
  Camera cam = oracle::small_camera(64, 100.0);
  GaussianSplat g;
  g.mu = Vec3(0, 0, 5);
  g.s = Vec3::Constant(0.3);
  g.opacity = 0.95;
  g.color = Vec3(1, 1, 1);

  SUBCASE("splat inside a single-label region takes it") {
    LabelMap seg(cam.width, cam.height, 3);
    const Scene out = assign_labels({g}, seg, cam);
    CHECK(out[0].label == 3);
  }

  SUBCASE("invisible splats keep label 0") {
    GaussianSplat hidden = g;
    hidden.mu = Vec3(0, 0, -5);
    LabelMap seg(cam.width, cam.height, 2);
    const Scene out = assign_labels({hidden}, seg, cam);
    CHECK(out[0].label == 0);
  }

  SUBCASE("agreeing multi-view voting equals single view") {
    std::vector<Camera> cams(4, cam);
    std::vector<LabelMap> segs(4, LabelMap(cam.width, cam.height, 2));
    const Scene multi = assign_labels({g}, segs, cams);
    const Scene single =
        assign_labels({g}, LabelMap(cam.width, cam.height, 2), cam);
    CHECK(multi[0].label == single[0].label);
    CHECK(multi[0].label == 2);
  }
}

TEST_CASE("band segmenter splits foreground rows into three bands") {
  Image3 img(10, 30, 0.5);
  for (int x = 0; x < 10; ++x) img.set(x, 0, Vec3::Zero());  // background row
  BandSegmenter seg;
  const LabelMap labels = seg.segment(img);
  CHECK(labels.at(5, 0) == 0);
  CHECK(labels.at(5, 2) == 1);
  CHECK(labels.at(5, 15) == 2);
  CHECK(labels.at(5, 29) == 3);
}
