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

#include "dsplat/edit/editor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "dsplat/core/check.hpp"
#include "dsplat/core/color.hpp"

namespace dsplat {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

const std::map<std::string, double>& color_hues() {
  static const std::map<std::string, double> hues = {
      {"red", 0.0},     {"orange", 30.0},  {"yellow", 60.0},
      {"green", 120.0}, {"cyan", 180.0},   {"blue", 240.0},
      {"purple", 280.0}, {"magenta", 300.0}, {"pink", 330.0}};
  return hues;
}

// recolor: "hue+120" shifts, a color word sets the hue outright.
void apply_recolor(Image3& img, const Mask& mask, const std::string& text) {
  double shift = 0.0;
  bool absolute = false;
  double target = 0.0;
  const std::string t = lower(text);
  const auto hue_pos = t.find("hue");
  if (hue_pos != std::string::npos && hue_pos + 3 < t.size()) {
    const char op = t[hue_pos + 3];
    const double value = std::atof(t.c_str() + hue_pos + 4);
    if (op == '+')
      shift = value;
    else if (op == '-')
      shift = -value;
    else if (op == ':') {
      absolute = true;
      target = value;
    }
  } else {
    for (const auto& [name, hue] : color_hues()) {
      if (t.find(name) != std::string::npos) {
        absolute = true;
        target = hue;
        break;
      }
    }
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!mask.at(x, y)) continue;
      Vec3 hsv = rgb_to_hsv(img.at(x, y));
      hsv[0] = absolute ? target : hsv[0] + shift;
      // recolored regions keep their shading but gain saturation so the hue
      // is well-defined
      if (absolute) hsv[1] = std::max(hsv[1], 0.6);
      img.set(x, y, hsv_to_rgb(hsv));
    }
  }
}

void apply_restyle(Image3& img, const Mask& mask) {
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!mask.at(x, y)) continue;
      double* p = img.px(x, y);
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(p[c], 0.0, 1.0);
        p[c] = v * v * (3.0 - 2.0 * v);  // s-curve contrast
      }
    }
  }
}

void apply_accessory(Image3& img, const Mask& mask, std::uint64_t seed) {
  double cx = 0.0, cy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (mask.at(x, y)) {
        cx += x;
        cy += y;
        ++n;
      }
  if (n == 0) return;
  cx /= n;
  cy /= n;
  const double radius = std::max(2.0, 0.35 * std::sqrt(static_cast<double>(n)));
  const double hue = static_cast<double>(seed % 360);
  const Vec3 ring_color = hsv_to_rgb(Vec3(hue, 0.85, 0.95));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (!mask.at(x, y)) continue;
      const double d = std::hypot(x - cx, y - cy);
      if (std::abs(d - radius) <= 1.0)
        img.set(x, y, ring_color);
      else if (d < radius - 1.0)
        img.set(x, y, 0.5 * img.at(x, y) + 0.5 * ring_color);
    }
  }
}

void apply_remove(Image3& img, const Mask& mask) {
  // Fill with the mean color of a one-pixel ring just outside the mask.
  Vec3 fill = Vec3::Zero();
  std::size_t n = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (mask.at(x, y)) continue;
      bool boundary = false;
      for (int dy = -1; dy <= 1 && !boundary; ++dy)
        for (int dx = -1; dx <= 1 && !boundary; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx >= 0 && nx < img.width && ny >= 0 && ny < img.height &&
              mask.at(nx, ny))
            boundary = true;
        }
      if (boundary) {
        fill += img.at(x, y);
        ++n;
      }
    }
  }
  if (n > 0) fill /= static_cast<double>(n);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (mask.at(x, y)) img.set(x, y, fill);
}

}  // namespace

bool respects_mask_contract(const Image3& source, const Image3& edited,
                            const Mask& mask, double tolerance) {
  if (!source.same_size(edited)) return false;
  for (int y = 0; y < source.height; ++y) {
    for (int x = 0; x < source.width; ++x) {
      if (mask.at(x, y)) continue;
      for (int c = 0; c < 3; ++c)
        if (std::abs(source.px(x, y)[c] - edited.px(x, y)[c]) > tolerance)
          return false;
    }
  }
  return true;
}

EditResponse MockEditor::edit(const EditRequest& request) const {
  EditResponse resp;
  resp.image = request.image;
  const std::string text = lower(request.instruction);
  if (text.find("recolor") != std::string::npos ||
      text.find("hue") != std::string::npos) {
    apply_recolor(resp.image, request.mask, text);
  } else if (text.find("accessory") != std::string::npos ||
             text.find("wear") != std::string::npos ||
             text.find("earring") != std::string::npos ||
             text.find("ring") != std::string::npos ||
             text.find("hat") != std::string::npos) {
    apply_accessory(resp.image, request.mask, request.seed);
  } else if (text.find("remove") != std::string::npos) {
    apply_remove(resp.image, request.mask);
  } else {
    apply_restyle(resp.image, request.mask);
  }
  resp.ok = true;
  resp.status = "ok";
  return resp;
}

EditResponse edit_image(const EditRequest& request, const ImageEditor& editor) {
  DS_CHECK(request.mask.width == request.image.width &&
               request.mask.height == request.image.height,
           InvalidParameter, "mask and image dimensions differ");
  EditResponse resp = editor.edit(request);
  if (!resp.ok) return resp;
  if (!resp.image.same_size(request.image)) {
    resp.ok = false;
    resp.status = "editor returned mismatched dimensions";
    return resp;
  }
  if (!respects_mask_contract(request.image, resp.image, request.mask)) {
    resp.ok = false;
    resp.status = "editor modified pixels outside the mask";
  }
  return resp;
}

}  // namespace dsplat
