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
#include "dsplat/maskmap/maskgrid.hpp"
#include "dsplat/rig/binding.hpp"
#include "dsplat/io/dataset.hpp"
#include "oracles.hpp"

using namespace dsplat;

namespace {

MaskNode constant_node(double t, double p, int w, int h, float value) {
  MaskNode node;
  node.t = t;
  node.p = p;
  node.values.assign(static_cast<std::size_t>(w) * h, value);
  return node;
}

MaskNode random_node(std::mt19937_64& rng, double t, double p, int w, int h) {
  MaskNode node;
  node.t = t;
  node.p = p;
  node.values.resize(static_cast<std::size_t>(w) * h);
  for (float& v : node.values) v = (rng() & 1) ? 1.0f : 0.0f;
  return node;
}

}  // namespace

TEST_CASE("single-node grid extends constantly") {
  std::mt19937_64 rng(1);
  const MaskGrid grid = build_mask_grid({random_node(rng, 0, 0, 4, 4)}, 4, 4);
  const SemanticMask center = grid.warp(0.0, 0.0);
  const SemanticMask far = grid.warp(123.0, -5.0);
  CHECK(center.mask.data == far.mask.data);
  CHECK_FALSE(center.clamped_query);
  CHECK(far.clamped_query);
}

TEST_CASE("identical node masks interpolate to themselves") {
  std::mt19937_64 rng(2);
  const MaskNode base = random_node(rng, 0, 0, 6, 6);
  std::vector<MaskNode> nodes;
  for (double t : {0.0, 1.0})
    for (double p : {0.0, 1.0}) {
      MaskNode n = base;
      n.t = t;
      n.p = p;
      nodes.push_back(n);
    }
  const MaskGrid grid = build_mask_grid(nodes, 6, 6);
  const SemanticMask mid = grid.warp(0.4, 0.7);
  for (std::size_t i = 0; i < base.values.size(); ++i)
    CHECK((mid.mask.data[i] != 0) == (base.values[i] >= 0.5f));
}

TEST_CASE("warp reproduces node masks exactly at nodes") {
  std::mt19937_64 rng(3);
  std::vector<MaskNode> nodes;
  for (double t : {0.0, 1.0, 2.0})
    for (double p : {0.0, 1.0}) nodes.push_back(random_node(rng, t, p, 8, 8));
  const MaskGrid grid = build_mask_grid(nodes, 8, 8);
  for (const MaskNode& n : nodes) {
    const SemanticMask m = grid.warp(n.t, n.p);
    for (std::size_t i = 0; i < n.values.size(); ++i)
      CHECK((m.mask.data[i] != 0) == (n.values[i] >= 0.5f));
    CHECK_FALSE(m.clamped_query);
  }
}

TEST_CASE("midpoint between all-true and all-false thresholds to true at 0.5") {
  std::vector<MaskNode> nodes = {constant_node(0, 0, 4, 4, 1.0f),
                                 constant_node(1, 0, 4, 4, 0.0f)};
  const MaskGrid grid = build_mask_grid(nodes, 4, 4);
  bool clamped = false;
  const std::vector<double> mid = grid.interpolate(0.5, 0.0, &clamped);
  for (double v : mid) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
  // >= theta keeps the tie
  const SemanticMask m = grid.warp(0.5, 0.0, 0.5);
  CHECK(m.mask.count_set() == 16);
}

TEST_CASE("interior warps match the direct four-node bilinear formula") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<MaskNode> nodes;
  for (double t : {0.0, 2.0})
    for (double p : {1.0, 4.0}) nodes.push_back(random_node(rng, t, p, 8, 8));
  const MaskGrid grid = build_mask_grid(nodes, 8, 8);

  for (int trial = 0; trial < 200; ++trial) {
    const double t = 2.0 * unif(rng);
    const double p = 1.0 + 3.0 * unif(rng);
    const std::vector<double> got = grid.interpolate(t, p);
    const double u = t / 2.0;
    const double v = (p - 1.0) / 3.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double expected = oracle::bilinear4(
          nodes[0].values[i], nodes[1].values[i], nodes[2].values[i],
          nodes[3].values[i], u, v);
      CHECK(std::abs(got[i] - expected) < 1e-12);
      CHECK(got[i] >= -1e-15);
      CHECK(got[i] <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("raising theta never adds pixels") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<MaskNode> nodes;
    for (double t : {0.0, 1.0})
      for (double p : {0.0, 1.0}) nodes.push_back(random_node(rng, t, p, 4, 4));
    const MaskGrid grid = build_mask_grid(nodes, 4, 4);
    const double t = unif(rng), p = unif(rng);
    const double lo = 0.2 + 0.3 * unif(rng);
    const double hi = lo + (1.0 - lo) * unif(rng);
    const SemanticMask low = grid.warp(t, p, lo);
    const SemanticMask high = grid.warp(t, p, hi);
    for (std::size_t i = 0; i < low.mask.data.size(); ++i)
      if (high.mask.data[i]) CHECK(low.mask.data[i]);
  }
}

TEST_CASE("build_mask_grid rejects incomplete grids and bad resolutions") {
  std::mt19937_64 rng(6);
  std::vector<MaskNode> nodes = {random_node(rng, 0, 0, 4, 4),
                                 random_node(rng, 0, 1, 4, 4),
                                 random_node(rng, 1, 0, 4, 4)};
  CHECK_THROWS_AS(build_mask_grid(nodes, 4, 4), Error);  // missing (1,1)

  nodes.push_back(random_node(rng, 1, 1, 2, 2));  // wrong resolution
  CHECK_THROWS_AS(build_mask_grid(nodes, 4, 4), Error);

  CHECK_THROWS_AS(build_mask_grid({}, 4, 4), Error);
  CHECK_THROWS_AS(MaskGrid{}.warp(0, 0), Error);
}

TEST_CASE("select_splats accumulates in-mask contributions") {
  // Two splats on a flat mesh: one inside the mask region, one outside.
  MeshFrame mesh;
  mesh.vertices = {Vec3(-3, -3, 0), Vec3(3, -3, 0), Vec3(0, 3, 0)};
  mesh.triangles = {{0, 1, 2}};

  Camera cam = oracle::small_camera(32, 40.0);
  cam.translation = Vec3(0, 0, 5);  // mesh plane at depth 5

  GaussianSplat inside;
  inside.mu = Vec3(-1.0, 0, 0);
  inside.s = Vec3::Constant(0.2);
  inside.opacity = 0.95;
  inside.label = 1;
  GaussianSplat outside = inside;
  outside.mu = Vec3(1.5, 0, 0);
  outside.label = 2;
  Scene scene = bind_splats({inside, outside}, mesh);

  // Mask covering only the left half of the image at both nodes.
  std::vector<MaskNode> nodes;
  for (double t : {0.0}) {
    for (double p : {0.0, 1.0}) {
      MaskNode n;
      n.t = t;
      n.p = p;
      n.values.assign(32 * 32, 0.0f);
      for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 16; ++x) n.values[y * 32 + x] = 1.0f;
      nodes.push_back(n);
    }
  }
  const MaskGrid grid = build_mask_grid(nodes, 32, 32);
  const std::vector<SelectNode> sample = {{0, 0, 0.0, 0.0}, {0, 1, 0.0, 1.0}};
  const std::vector<Camera> cams = {cam, cam};
  const std::vector<MeshFrame> frames = {mesh};

  const SplatSelection sel =
      select_splats(scene, frames, cams, grid, sample, 1e-3);
  REQUIRE(sel.indices.size() == 1);
  CHECK(sel.indices[0] == 0);
  CHECK(sel.contains(0));
  CHECK_FALSE(sel.contains(1));

  // Weight approximates the covered pixel count for a near-opaque splat.
  const RenderOutput out = render(pose_splats(scene, mesh), cam);
  double covered = 0.0;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 16; ++x)
      for (const Contribution& c : out.records_at(x, y))
        if (c.splat == 0) covered += c.weight;
  CHECK(sel.weights[0] == doctest::Approx(2.0 * covered).epsilon(1e-9));

  // Union property: two single-node selections with w_min = 0 merge into the
  // two-node selection.
  const SplatSelection a =
      select_splats(scene, frames, cams, grid, {sample[0]}, 0.0);
  const SplatSelection b =
      select_splats(scene, frames, cams, grid, {sample[1]}, 0.0);
  const SplatSelection both =
      select_splats(scene, frames, cams, grid, sample, 0.0);
  std::set<int> union_ab(a.indices.begin(), a.indices.end());
  union_ab.insert(b.indices.begin(), b.indices.end());
  CHECK(union_ab == both.index_set);
}

TEST_CASE("mask grid built from stage-one label renders matches bit-exactly") {
  std::mt19937_64 rng(12);
  const MeshFrame mesh = make_icosphere(1);
  Camera cam = oracle::small_camera(32, 40.0);
  cam.translation = Vec3(0, 0, 4);
  Scene scene = oracle::random_scene(rng, 30, cam);
  for (auto& g : scene) g.mu = g.mu.normalized() * 1.1;
  for (auto& g : scene) g.label = g.mu.y() > 0 ? 1 : 2;
  scene = bind_splats(scene, mesh);

  const Mask m = render_label_mask(pose_splats(scene, mesh), cam, 1);
  const MaskGrid grid =
      build_mask_grid({mask_node_from_mask(m, 0.0, 0.0)}, 32, 32);
  const SemanticMask back = grid.warp(0.0, 0.0);
  CHECK(back.mask.data == m.data);
}
