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

#include "dsplat/io/dataset.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dsplat/core/check.hpp"
#include "dsplat/io/image_io.hpp"
#include "dsplat/io/obj.hpp"

namespace dsplat {

namespace fs = std::filesystem;
using nlohmann::json;

Image3 Dataset::image(int frame, int camera) const {
  return read_png(image_paths[frame][camera]);
}

LabelMap Dataset::labels(int frame, int camera) const {
  DS_CHECK(has_labels(), Io, "dataset carries no segmenter masks");
  return read_label_png(label_paths[frame][camera]);
}

Dataset load_dataset(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  DS_CHECK(in.good(), Io, "cannot open manifest: " + manifest_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io,
                std::string("manifest parse error: ") + e.what());
  }
  DS_CHECK(doc.value("version", 0) == 1, Io, "unsupported manifest version");

  Dataset ds;
  ds.root = fs::path(manifest_path).parent_path().string();
  ds.scene_extent = doc.value("scene_extent", 1.0);
  const auto resolve = [&](const std::string& rel) {
    return (fs::path(ds.root) / rel).string();
  };

  DS_CHECK(doc.contains("cameras") && doc["cameras"].is_array() &&
               !doc["cameras"].empty(),
           Io, "manifest has no cameras");
  int pose_index = 0;
  for (const json& jc : doc["cameras"]) {
    Camera cam;
    cam.name = jc.value("name", "cam" + std::to_string(pose_index));
    cam.fx = jc.at("fx").get<double>();
    cam.fy = jc.at("fy").get<double>();
    cam.cx = jc.at("cx").get<double>();
    cam.cy = jc.at("cy").get<double>();
    cam.width = jc.at("width").get<int>();
    cam.height = jc.at("height").get<int>();
    const auto rot = jc.at("rotation").get<std::vector<double>>();
    DS_CHECK(rot.size() == 9, Io, "camera rotation must have 9 entries");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cam.rotation(r, c) = rot[r * 3 + c];
    const auto tr = jc.at("translation").get<std::vector<double>>();
    DS_CHECK(tr.size() == 3, Io, "camera translation must have 3 entries");
    cam.translation = Vec3(tr[0], tr[1], tr[2]);
    cam.pose_index = pose_index++;
    cam.validate();
    ds.cameras.push_back(cam);
  }

  DS_CHECK(doc.contains("frames") && doc["frames"].is_array() &&
               !doc["frames"].empty(),
           Io, "manifest has no frames");
  const std::size_t n_cams = ds.cameras.size();
  bool any_labels = false;
  for (const json& jf : doc["frames"]) {
    const int t = jf.at("t").get<int>();
    const std::string mesh_rel = jf.at("mesh").get<std::string>();
    const std::string mesh_path = resolve(mesh_rel);
    DS_CHECK(fs::exists(mesh_path), Io,
             "missing mesh file for frame t=" + std::to_string(t) + ": " +
                 mesh_rel);
    MeshFrame mesh = read_obj(mesh_path);
    mesh.timestamp = t;

    const auto images = jf.at("images").get<std::vector<std::string>>();
    DS_CHECK(images.size() == n_cams, Io,
             "frame t=" + std::to_string(t) +
                 " does not provide one image per camera");
    std::vector<std::string> img_paths;
    for (std::size_t c = 0; c < images.size(); ++c) {
      const std::string path = resolve(images[c]);
      DS_CHECK(fs::exists(path), Io,
               "missing image for frame t=" + std::to_string(t) +
                   ", camera p=" + std::to_string(c) + ": " + images[c]);
      img_paths.push_back(path);
    }

    std::vector<std::string> lbl_paths;
    if (jf.contains("labels")) {
      const auto labels = jf.at("labels").get<std::vector<std::string>>();
      DS_CHECK(labels.size() == n_cams, Io,
               "frame t=" + std::to_string(t) +
                   " does not provide one label map per camera");
      for (std::size_t c = 0; c < labels.size(); ++c) {
        const std::string path = resolve(labels[c]);
        DS_CHECK(fs::exists(path), Io,
                 "missing label map for frame t=" + std::to_string(t) +
                     ", camera p=" + std::to_string(c) + ": " + labels[c]);
        lbl_paths.push_back(path);
      }
      any_labels = true;
    }

    if (!ds.frames.empty())
      DS_CHECK(ds.frames.front().same_topology(mesh), Io,
               "mesh topology mismatch at frame t=" + std::to_string(t));
    ds.frames.push_back(std::move(mesh));
    ds.image_paths.push_back(std::move(img_paths));
    ds.label_paths.push_back(std::move(lbl_paths));
  }
  if (!any_labels) ds.label_paths.clear();
  return ds;
}

}  // namespace dsplat
