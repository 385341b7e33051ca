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

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dsplat/core/check.hpp"
#include "dsplat/core/types.hpp"

namespace dsplat {

// Row-major RGB image, values nominally in [0, 1].
struct Image3 {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // size width*height*3

  Image3() = default;
  Image3(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  double* px(int x, int y) {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const double* px(int x, int y) const {
    return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  Vec3 at(int x, int y) const {
    const double* p = px(x, y);
    return Vec3(p[0], p[1], p[2]);
  }
  void set(int x, int y, const Vec3& c) {
    double* p = px(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  bool same_size(const Image3& o) const {
    return width == o.width && height == o.height;
  }
};

// Single-channel double image.
struct Image1 {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image1() = default;
  Image1(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// Per-pixel integer label ids.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> data;

  LabelMap() = default;
  LabelMap(int w, int h, int fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  int& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  int at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

// round(255 * clamp(v, 0, 1)); the quantization used by every 8-bit sink.
inline std::uint8_t quantize8(double v) {
  return static_cast<std::uint8_t>(
      std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

// Quantizes an image the way the 8-bit writers do, returning it to [0,1].
Image3 quantize_image(const Image3& img);

}  // namespace dsplat
