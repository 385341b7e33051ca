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

#include "dsplat/io/metrics.hpp"

#include <cmath>
#include <vector>

#include "dsplat/core/check.hpp"

namespace dsplat {

double mean_squared_error(const Image3& a, const Image3& b) {
  DS_CHECK(a.same_size(b), InvalidParameter, "image dimensions differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.data.size());
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

std::vector<double> gaussian_window() {
  std::vector<double> w(kWindow * kWindow);
  const int half = kWindow / 2;
  double sum = 0.0;
  for (int y = 0; y < kWindow; ++y) {
    for (int x = 0; x < kWindow; ++x) {
      const double dx = x - half, dy = y - half;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      w[y * kWindow + x] = v;
      sum += v;
    }
  }
  for (double& v : w) v /= sum;
  return w;
}

double ssim_channel(const Image3& a, const Image3& b, int ch,
                    const std::vector<double>& win) {
  const int half = kWindow / 2;
  const double c1 = kK1 * kK1;  // L = 1
  const double c2 = kK2 * kK2;
  double total = 0.0;
  std::size_t count = 0;
  for (int y = half; y < a.height - half; ++y) {
    for (int x = half; x < a.width - half; ++x) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      for (int wy = 0; wy < kWindow; ++wy) {
        for (int wx = 0; wx < kWindow; ++wx) {
          const double w = win[wy * kWindow + wx];
          const double va = a.px(x + wx - half, y + wy - half)[ch];
          const double vb = b.px(x + wx - half, y + wy - half)[ch];
          mu_a += w * va;
          mu_b += w * vb;
          aa += w * va * va;
          bb += w * vb * vb;
          ab += w * va * vb;
        }
      }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double ssim = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                          ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      total += ssim;
      ++count;
    }
  }
  DS_CHECK(count > 0, InvalidParameter, "image too small for an 11x11 SSIM window");
  return total / static_cast<double>(count);
}

}  // namespace

Metrics compute_metrics(const Image3& reference, const Image3& test) {
  DS_CHECK(reference.same_size(test), InvalidParameter, "image dimensions differ");
  Metrics m;
  const double mse = mean_squared_error(reference, test);
  m.psnr = mse < 1e-10 ? 99.0 : 10.0 * std::log10(1.0 / mse);
  const std::vector<double> win = gaussian_window();
  double ssim = 0.0;
  for (int ch = 0; ch < 3; ++ch) ssim += ssim_channel(reference, test, ch, win);
  m.ssim = ssim / 3.0;
  return m;
}

}  // namespace dsplat
