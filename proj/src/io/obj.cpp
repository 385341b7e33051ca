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

#include "dsplat/io/obj.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsplat/core/check.hpp"

namespace dsplat {

MeshFrame read_obj(const std::string& path) {
  std::ifstream in(path);
  DS_CHECK(in.good(), Io, "cannot open mesh file: " + path);
  MeshFrame mesh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v[0] >> v[1] >> v[2];
      DS_CHECK(!ls.fail(), Io, "malformed vertex line in " + path);
      mesh.vertices.push_back(v);
    } else if (tag == "f") {
      std::array<int, 3> tri{};
      for (int k = 0; k < 3; ++k) {
        std::string token;
        ls >> token;
        DS_CHECK(!token.empty() && token.find('/') == std::string::npos, Io,
                 "only plain triangulated faces are supported: " + path);
        tri[k] = std::stoi(token) - 1;
      }
      std::string extra;
      DS_CHECK(!(ls >> extra), Io, "non-triangulated face in " + path);
      mesh.triangles.push_back(tri);
    }
    // other tags ignored
  }
  mesh.validate();
  return mesh;
}

void write_obj(const std::string& path, const MeshFrame& mesh) {
  std::ofstream out(path, std::ios::trunc);
  DS_CHECK(out.good(), Io, "cannot open mesh file for writing: " + path);
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
    out << buf;
  }
  for (const auto& t : mesh.triangles)
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  DS_CHECK(out.good(), Io, "short write: " + path);
}

}  // namespace dsplat
