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

#include "dsplat/io/splat_file.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "dsplat/core/check.hpp"

namespace dsplat {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'P', 'L', 'A', 'T', '\0', '\x01'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>* out) : out_(out) {}
  void f32(double v) {
    const float f = static_cast<float>(v);
    push(&f, sizeof(f));
  }
  void i32(std::int32_t v) { push(&v, sizeof(v)); }
  void u32(std::uint32_t v) { push(&v, sizeof(v)); }
  void u8(std::uint8_t v) { push(&v, sizeof(v)); }
  void vec3(const Vec3& v) {
    for (int k = 0; k < 3; ++k) f32(v[k]);
  }
  void quat(const Quat& q) {
    for (int k = 0; k < 4; ++k) f32(q[k]);
  }

 private:
  void push(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_->insert(out_->end(), b, b + n);
  }
  std::vector<std::uint8_t>* out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  double f32() {
    float f;
    pull(&f, sizeof(f));
    return f;
  }
  std::int32_t i32() {
    std::int32_t v;
    pull(&v, sizeof(v));
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    pull(&v, sizeof(v));
    return v;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    pull(&v, sizeof(v));
    return v;
  }
  Vec3 vec3() {
    Vec3 v;
    for (int k = 0; k < 3; ++k) v[k] = f32();
    return v;
  }
  Quat quat() {
    Quat q;
    for (int k = 0; k < 4; ++k) q[k] = f32();
    return q;
  }
  bool done() const { return pos_ == size_; }

 private:
  void pull(void* p, std::size_t n) {
    DS_CHECK(pos_ + n <= size_, Io, "truncated splat file");
    std::memcpy(p, data_ + pos_, n);
    pos_ += n;
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_scene(const std::string& path, const Scene& scene) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), kMagic, kMagic + 8);
  Writer w(&buf);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(scene.size()));
  for (const GaussianSplat& g : scene) {
    w.vec3(g.mu);
    w.quat(g.q);
    w.vec3(g.s);
    w.f32(g.opacity);
    w.vec3(g.color);
    w.i32(g.label);
    w.u8(g.decoupled ? 1 : 0);
    w.u8(g.binding ? 1 : 0);
    const MeshBinding bind = g.binding.value_or(MeshBinding{});
    w.i32(bind.triangle);
    w.vec3(bind.plane_bary);
    w.vec3(bind.bary);
    w.f32(bind.normal_offset);
    w.quat(bind.local_rotation);
    w.vec3(bind.local_scale);
    w.vec3(bind.initial_offset);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  DS_CHECK(out.good(), Io, "cannot open splat file for writing: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  DS_CHECK(out.good(), Io, "short write: " + path);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  DS_CHECK(in.good(), Io, "cannot open splat file: " + path);
  const std::vector<std::uint8_t> buf(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  DS_CHECK(buf.size() >= 16, Io, "truncated splat file: " + path);
  DS_CHECK(std::memcmp(buf.data(), kMagic, 8) == 0, Io,
           "not a splat file: " + path);
  Reader r(buf.data() + 8, buf.size() - 8);
  const std::uint32_t version = r.u32();
  DS_CHECK(version == kVersion, Io, "unsupported splat file version");
  const std::uint32_t count = r.u32();
  Scene scene;
  scene.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    GaussianSplat g;
    g.mu = r.vec3();
    g.q = r.quat();
    g.s = r.vec3();
    g.opacity = r.f32();
    g.color = r.vec3();
    g.label = r.i32();
    g.decoupled = r.u8() != 0;
    const bool has_binding = r.u8() != 0;
    MeshBinding bind;
    bind.triangle = r.i32();
    bind.plane_bary = r.vec3();
    bind.bary = r.vec3();
    bind.normal_offset = r.f32();
    bind.local_rotation = r.quat();
    bind.local_scale = r.vec3();
    bind.initial_offset = r.vec3();
    if (has_binding) g.binding = bind;
    scene.push_back(g);
  }
  DS_CHECK(r.done(), Io, "trailing bytes in splat file: " + path);
  return scene;
}

}  // namespace dsplat
