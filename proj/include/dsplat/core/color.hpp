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
#include <cmath>

#include "dsplat/core/types.hpp"

namespace dsplat {

// Hue in degrees [0, 360), saturation and value in [0, 1].
inline Vec3 rgb_to_hsv(const Vec3& rgb) {
  const double r = rgb[0], g = rgb[1], b = rgb[2];
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  const double delta = maxc - minc;
  double hue = 0.0;
  if (delta > 0.0) {
    if (maxc == r)
      hue = 60.0 * std::fmod((g - b) / delta, 6.0);
    else if (maxc == g)
      hue = 60.0 * ((b - r) / delta + 2.0);
    else
      hue = 60.0 * ((r - g) / delta + 4.0);
    if (hue < 0.0) hue += 360.0;
  }
  const double sat = maxc > 0.0 ? delta / maxc : 0.0;
  return Vec3(hue, sat, maxc);
}

inline Vec3 hsv_to_rgb(const Vec3& hsv) {
  const double h = std::fmod(std::fmod(hsv[0], 360.0) + 360.0, 360.0);
  const double s = std::clamp(hsv[1], 0.0, 1.0);
  const double v = std::clamp(hsv[2], 0.0, 1.0);
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  Vec3 rgb;
  if (hp < 1)
    rgb = Vec3(c, x, 0);
  else if (hp < 2)
    rgb = Vec3(x, c, 0);
  else if (hp < 3)
    rgb = Vec3(0, c, x);
  else if (hp < 4)
    rgb = Vec3(0, x, c);
  else if (hp < 5)
    rgb = Vec3(x, 0, c);
  else
    rgb = Vec3(c, 0, x);
  return rgb + Vec3::Constant(v - c);
}

// Smallest signed angular difference a - b in degrees, in (-180, 180].
inline double hue_difference(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

}  // namespace dsplat
