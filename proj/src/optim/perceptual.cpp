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

#include <cmath>
#include <vector>

#include "dsplat/core/check.hpp"
#include "dsplat/optim/losses.hpp"

namespace dsplat {

namespace {

constexpr double kGradEps = 1e-12;

Image3 downsample2(const Image3& img) {
  const int w = std::max(1, img.width / 2);
  const int h = std::max(1, img.height / 2);
  Image3 out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int bw = std::min(2, img.width - 2 * x);
      const int bh = std::min(2, img.height - 2 * y);
      Vec3 sum = Vec3::Zero();
      for (int dy = 0; dy < bh; ++dy)
        for (int dx = 0; dx < bw; ++dx) sum += img.at(2 * x + dx, 2 * y + dy);
      out.set(x, y, sum / (bw * bh));
    }
  }
  return out;
}

// Distributes a coarse-level adjoint back through 2x average pooling.
void upsample2_adjoint(const Image3& coarse_adj, Image3& fine_adj) {
  for (int y = 0; y < coarse_adj.height; ++y) {
    for (int x = 0; x < coarse_adj.width; ++x) {
      const int bw = std::min(2, fine_adj.width - 2 * x);
      const int bh = std::min(2, fine_adj.height - 2 * y);
      const Vec3 share = coarse_adj.at(x, y) / (bw * bh);
      for (int dy = 0; dy < bh; ++dy)
        for (int dx = 0; dx < bw; ++dx)
          fine_adj.set(2 * x + dx, 2 * y + dy,
                       fine_adj.at(2 * x + dx, 2 * y + dy) + share);
    }
  }
}

// Central differences with replicated borders, per channel.
void gradients(const Image3& img, Image3* gx, Image3* gy) {
  *gx = Image3(img.width, img.height);
  *gy = Image3(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const int xm = std::max(0, x - 1), xp = std::min(img.width - 1, x + 1);
      const int ym = std::max(0, y - 1), yp = std::min(img.height - 1, y + 1);
      for (int c = 0; c < 3; ++c) {
        gx->px(x, y)[c] = 0.5 * (img.px(xp, y)[c] - img.px(xm, y)[c]);
        gy->px(x, y)[c] = 0.5 * (img.px(x, yp)[c] - img.px(x, ym)[c]);
      }
    }
  }
}

Image3 grad_magnitude(const Image3& gx, const Image3& gy) {
  Image3 m(gx.width, gx.height);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    m.data[i] = std::sqrt(gx.data[i] * gx.data[i] + gy.data[i] * gy.data[i] +
                          kGradEps);
  return m;
}

int usable_levels(const Image3& img) {
  int levels = 0;
  int w = img.width, h = img.height;
  while (levels < GradientMagnitudeMetric::kLevels && w >= 2 && h >= 2) {
    ++levels;
    w /= 2;
    h /= 2;
  }
  return std::max(1, levels);
}

}  // namespace

double GradientMagnitudeMetric::compare(const Image3& a,
                                        const Image3& b) const {
  DS_CHECK(a.same_size(b), InvalidParameter, "image dimensions differ");
  Image3 la = a, lb = b;
  const int levels = usable_levels(a);
  double total = 0.0;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) {
      la = downsample2(la);
      lb = downsample2(lb);
    }
    Image3 gxa, gya, gxb, gyb;
    gradients(la, &gxa, &gya);
    gradients(lb, &gxb, &gyb);
    const Image3 ma = grad_magnitude(gxa, gya);
    const Image3 mb = grad_magnitude(gxb, gyb);
    double level_sum = 0.0;
    for (std::size_t i = 0; i < ma.data.size(); ++i)
      level_sum += std::abs(ma.data[i] - mb.data[i]);
    total += level_sum / static_cast<double>(ma.data.size());
  }
  return total / levels;
}

Image3 GradientMagnitudeMetric::gradient_wrt_second(const Image3& a,
                                                    const Image3& b) const {
  DS_CHECK(a.same_size(b), InvalidParameter, "image dimensions differ");
  const int levels = usable_levels(a);

  std::vector<Image3> pyramid_a{a}, pyramid_b{b};
  for (int level = 1; level < levels; ++level) {
    pyramid_a.push_back(downsample2(pyramid_a.back()));
    pyramid_b.push_back(downsample2(pyramid_b.back()));
  }

  Image3 adjoint;  // accumulated from the coarsest level upward
  for (int level = levels - 1; level >= 0; --level) {
    const Image3& la = pyramid_a[level];
    const Image3& lb = pyramid_b[level];
    Image3 gxa, gya, gxb, gyb;
    gradients(la, &gxa, &gya);
    gradients(lb, &gxb, &gyb);
    const Image3 ma = grad_magnitude(gxa, gya);
    const Image3 mb = grad_magnitude(gxb, gyb);

    // d(level mean |ma-mb|)/d(gxb, gyb)
    const double scale = 1.0 / (levels * static_cast<double>(mb.data.size()));
    Image3 level_adj(lb.width, lb.height, 0.0);
    for (int y = 0; y < lb.height; ++y) {
      for (int x = 0; x < lb.width; ++x) {
        const int xm = std::max(0, x - 1), xp = std::min(lb.width - 1, x + 1);
        const int ym = std::max(0, y - 1), yp = std::min(lb.height - 1, y + 1);
        for (int c = 0; c < 3; ++c) {
          const std::size_t i =
              (static_cast<std::size_t>(y) * lb.width + x) * 3 + c;
          const double diff = mb.data[i] - ma.data[i];
          const double sgn = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          const double dm = scale * sgn / mb.data[i];
          const double dgx = dm * gxb.data[i];
          const double dgy = dm * gyb.data[i];
          level_adj.px(xp, y)[c] += 0.5 * dgx;
          level_adj.px(xm, y)[c] -= 0.5 * dgx;
          level_adj.px(x, yp)[c] += 0.5 * dgy;
          level_adj.px(x, ym)[c] -= 0.5 * dgy;
        }
      }
    }

    if (adjoint.data.empty()) {
      adjoint = std::move(level_adj);
    } else {
      // adjoint currently lives one level coarser; pull it up and add.
      Image3 up(lb.width, lb.height, 0.0);
      upsample2_adjoint(adjoint, up);
      for (std::size_t i = 0; i < up.data.size(); ++i)
        up.data[i] += level_adj.data[i];
      adjoint = std::move(up);
    }
  }
  return adjoint;
}

}  // namespace dsplat
