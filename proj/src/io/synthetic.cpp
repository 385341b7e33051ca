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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "dsplat/core/check.hpp"
#include "dsplat/core/color.hpp"
#include "dsplat/io/dataset.hpp"
#include "dsplat/io/image_io.hpp"
#include "dsplat/io/obj.hpp"
#include "dsplat/io/splat_file.hpp"
#include "dsplat/render/renderer.hpp"
#include "dsplat/rig/binding.hpp"

namespace dsplat {

namespace fs = std::filesystem;
using nlohmann::json;

MeshFrame make_icosphere(int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  MeshFrame mesh;
  mesh.vertices = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& v : mesh.vertices) v.normalize();
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    const auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vec3 m = (mesh.vertices[a] + mesh.vertices[b]).normalized();
      mesh.vertices.push_back(m);
      const int idx = static_cast<int>(mesh.vertices.size()) - 1;
      midpoint[key] = idx;
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    mesh.triangles = std::move(next);
  }
  return mesh;
}

namespace {

// Jaw-like bulge: lower vertices move radially outward, zero at frame 0.
MeshFrame deform_mesh(const MeshFrame& base, int t, int n_frames,
                      double amplitude) {
  MeshFrame out = base;
  out.timestamp = t;
  const double phase =
      n_frames > 1 ? std::sin(M_PI * t / (n_frames - 1.0)) : 0.0;
  for (Vec3& v : out.vertices) {
    const double y = v.y();
    if (y >= -0.2) continue;
    const double w = std::min(1.0, (-0.2 - y) / 0.5);
    v += amplitude * phase * w * w * v.normalized();
  }
  return out;
}

int band_label(double y) {
  if (y > 0.25) return 1;   // upper / hair
  if (y > -0.25) return 2;  // middle / face
  return 3;                 // lower / neck
}

std::string frame_tag(int t, int c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%04d_c%02d", t, c);
  return buf;
}

}  // namespace

SyntheticResult generate_synthetic_scene(const std::string& out_dir,
                                         const SyntheticConfig& config) {
  DS_CHECK(config.n_cameras > 0 && config.n_frames > 0 && config.resolution > 0,
           Config, "invalid synthetic config");
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "meshes");
  fs::create_directories(fs::path(out_dir) / "images");
  fs::create_directories(fs::path(out_dir) / "labels");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const MeshFrame base = make_icosphere(config.subdivisions);

  // Ground-truth splats on the sphere surface, colored by semantic band.
  std::vector<double> tri_area(base.triangles.size());
  double total_area = 0.0;
  for (std::size_t i = 0; i < base.triangles.size(); ++i) {
    const auto& tri = base.triangles[i];
    tri_area[i] = 0.5 * (base.vertices[tri[1]] - base.vertices[tri[0]])
                            .cross(base.vertices[tri[2]] - base.vertices[tri[0]])
                            .norm();
    total_area += tri_area[i];
  }

  Scene gt;
  gt.reserve(config.n_splats);
  for (int i = 0; i < config.n_splats; ++i) {
    double pick = unif(rng) * total_area;
    std::size_t tri_id = 0;
    while (tri_id + 1 < tri_area.size() && pick > tri_area[tri_id]) {
      pick -= tri_area[tri_id];
      ++tri_id;
    }
    const auto& tri = base.triangles[tri_id];
    double b1 = unif(rng), b2 = unif(rng);
    if (b1 + b2 > 1.0) {
      b1 = 1.0 - b1;
      b2 = 1.0 - b2;
    }
    const Vec3 point = (1.0 - b1 - b2) * base.vertices[tri[0]] +
                       b1 * base.vertices[tri[1]] + b2 * base.vertices[tri[2]];
    GaussianSplat g;
    g.mu = point + (unif(rng) - 0.5) * 0.04 * point.normalized();
    const Vec3 axis =
        Vec3(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5).normalized();
    const double angle = unif(rng) * M_PI;
    g.q = Quat(std::cos(angle / 2), axis.x() * std::sin(angle / 2),
               axis.y() * std::sin(angle / 2), axis.z() * std::sin(angle / 2));
    g.s = Vec3(0.04 + 0.07 * unif(rng), 0.04 + 0.07 * unif(rng),
               0.04 + 0.07 * unif(rng));
    g.opacity = 0.6 + 0.35 * unif(rng);
    g.label = band_label(point.y());
    const double base_hue = g.label == 1 ? 30.0 : (g.label == 2 ? 190.0 : 285.0);
    g.color = hsv_to_rgb(Vec3(base_hue + 30.0 * (unif(rng) - 0.5),
                              0.55 + 0.3 * unif(rng), 0.55 + 0.4 * unif(rng)));
    gt.push_back(g);
  }
  gt = bind_splats(gt, base);

  // Cameras on a ring around the head; list order is the pose ordering.
  std::vector<Camera> cameras;
  for (int c = 0; c < config.n_cameras; ++c) {
    const double angle = 2.0 * M_PI * c / config.n_cameras;
    const Vec3 eye(config.camera_radius * std::sin(angle), 0.2,
                   config.camera_radius * std::cos(angle));
    Camera cam = make_look_at_camera(eye, Vec3::Zero(), Vec3(0, 1, 0),
                                     config.focal, config.resolution,
                                     config.resolution);
    cam.pose_index = c;
    cam.name = "cam" + std::to_string(c);
    cameras.push_back(cam);
  }

  json manifest;
  manifest["version"] = 1;
  manifest["scene_extent"] = 2.4;
  manifest["generator"] = {{"seed", config.seed},
                           {"n_splats", config.n_splats},
                           {"subdivisions", config.subdivisions},
                           {"deform_amplitude", config.deform_amplitude}};
  for (const Camera& cam : cameras) {
    json jc;
    jc["name"] = cam.name;
    jc["fx"] = cam.fx;
    jc["fy"] = cam.fy;
    jc["cx"] = cam.cx;
    jc["cy"] = cam.cy;
    jc["width"] = cam.width;
    jc["height"] = cam.height;
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) rot[r * 3 + k] = cam.rotation(r, k);
    jc["rotation"] = rot;
    jc["translation"] = {cam.translation.x(), cam.translation.y(),
                         cam.translation.z()};
    manifest["cameras"].push_back(jc);
  }

  RenderConfig rc;
  rc.keep_records = false;
  for (int t = 0; t < config.n_frames; ++t) {
    const MeshFrame frame =
        deform_mesh(base, t, config.n_frames, config.deform_amplitude);
    char mesh_name[64];
    std::snprintf(mesh_name, sizeof(mesh_name), "meshes/frame_%04d.obj", t);
    write_obj((fs::path(out_dir) / mesh_name).string(), frame);

    const Scene posed = pose_splats(gt, frame);
    json jf;
    jf["t"] = t;
    jf["mesh"] = mesh_name;
    for (int c = 0; c < config.n_cameras; ++c) {
      const RenderOutput out = render(posed, cameras[c], rc);
      const std::string img_rel = "images/" + frame_tag(t, c) + ".png";
      const std::string lbl_rel = "labels/" + frame_tag(t, c) + ".png";
      write_png((fs::path(out_dir) / img_rel).string(), out.color);
      write_label_png((fs::path(out_dir) / lbl_rel).string(), out.labels);
      jf["images"].push_back(img_rel);
      jf["labels"].push_back(lbl_rel);
    }
    manifest["frames"].push_back(jf);
  }

  save_scene((fs::path(out_dir) / "ground_truth.dsplat").string(), gt);

  const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  std::ofstream mf(manifest_path, std::ios::trunc);
  DS_CHECK(mf.good(), Io, "cannot write manifest: " + manifest_path);
  mf << manifest.dump(2) << "\n";

  return SyntheticResult{manifest_path, gt};
}

}  // namespace dsplat
