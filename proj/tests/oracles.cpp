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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsplat::oracle {

namespace {

// The same alpha response the renderer specifies, restated directly.
double oracle_alpha(double opacity, double rho) {
  if (rho >= 9.0) return 0.0;
  double window = 1.0;
  if (rho > 6.25) {
    const double x = (9.0 - rho) / (9.0 - 6.25);
    window = x * x * (3.0 - 2.0 * x);
  }
  return std::min(opacity * std::exp(-0.5 * rho) * window, 0.999);
}

Mat3 rotation_of(const Quat& q_raw) {
  const Quat q = q_raw / q_raw.norm();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

}  // namespace

Image3 naive_render(const Scene& scene, const Camera& cam) {
  struct Projected {
    Vec2 mean;
    Mat2 cov_inv;
    double depth;
    double opacity;
    Vec3 color;
    int source;
  };
  std::vector<Projected> projected;
  for (int i = 0; i < static_cast<int>(scene.size()); ++i) {
    const GaussianSplat& g = scene[i];
    const Vec3 t = cam.rotation * g.mu + cam.translation;
    if (t.z() <= 0.01) continue;
    Projected p;
    p.depth = t.z();
    p.mean = Vec2(cam.fx * t.x() / t.z() + cam.cx,
                  cam.fy * t.y() / t.z() + cam.cy);
    Eigen::Matrix<double, 2, 3> jac;
    jac << cam.fx / t.z(), 0, -cam.fx * t.x() / (t.z() * t.z()),
           0, cam.fy / t.z(), -cam.fy * t.y() / (t.z() * t.z());
    const Mat3 r = rotation_of(g.q);
    const Mat3 sigma =
        r * g.s.asDiagonal() * g.s.asDiagonal() * r.transpose();
    const Eigen::Matrix<double, 2, 3> v = jac * cam.rotation;
    const Mat2 cov = v * sigma * v.transpose() + 0.3 * Mat2::Identity();
    p.cov_inv = cov.inverse();
    p.opacity = g.opacity;
    p.color = g.color;
    p.source = i;
    projected.push_back(p);
  }
  std::stable_sort(projected.begin(), projected.end(),
                   [](const Projected& a, const Projected& b) {
                     if (a.depth != b.depth) return a.depth < b.depth;
                     return a.source < b.source;
                   });

  Image3 img(cam.width, cam.height, 0.0);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      double transmittance = 1.0;
      Vec3 color = Vec3::Zero();
      for (const Projected& p : projected) {
        if (transmittance < 1e-4) break;
        const Vec2 d(x - p.mean.x(), y - p.mean.y());
        const double rho = d.dot(p.cov_inv * d);
        const double alpha = oracle_alpha(p.opacity, rho);
        if (alpha <= 0.0) continue;
        color += p.color * alpha * transmittance;
        transmittance *= 1.0 - alpha;
      }
      img.set(x, y, color);
    }
  }
  return img;
}

double bilinear4(double v00, double v01, double v10, double v11, double u,
                 double v) {
  return (1 - u) * (1 - v) * v00 + (1 - u) * v * v01 + u * (1 - v) * v10 +
         u * v * v11;
}

double ssim_reference(const Image3& a, const Image3& b) {
  const int win = 11, half = 5;
  const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double weight[11][11];
  double wsum = 0.0;
  for (int i = 0; i < win; ++i)
    for (int j = 0; j < win; ++j) {
      weight[i][j] = std::exp(-((i - half) * (i - half) + (j - half) * (j - half)) /
                              (2 * sigma * sigma));
      wsum += weight[i][j];
    }
  for (int i = 0; i < win; ++i)
    for (int j = 0; j < win; ++j) weight[i][j] /= wsum;

  double total = 0.0;
  int count = 0;
  for (int ch = 0; ch < 3; ++ch) {
    for (int y = half; y < a.height - half; ++y) {
      for (int x = half; x < a.width - half; ++x) {
        double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
        for (int i = 0; i < win; ++i)
          for (int j = 0; j < win; ++j) {
            const double pa = a.px(x + j - half, y + i - half)[ch];
            const double pb = b.px(x + j - half, y + i - half)[ch];
            ma += weight[i][j] * pa;
            mb += weight[i][j] * pb;
            va += weight[i][j] * pa * pa;
            vb += weight[i][j] * pb * pb;
            cov += weight[i][j] * pa * pb;
          }
        va -= ma * ma;
        vb -= mb * mb;
        cov -= ma * mb;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                 ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
  }
  return total / count;
}

Camera small_camera(int size, double focal) {
  Camera cam;
  cam.fx = cam.fy = focal;
  cam.cx = cam.cy = 0.5 * size;
  cam.width = cam.height = size;
  return cam;
}

Scene random_scene(std::mt19937_64& rng, int n_splats, const Camera& cam) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Scene scene;
  for (int i = 0; i < n_splats; ++i) {
    GaussianSplat g;
    // Depths keep a guaranteed gap so finite-difference probes cannot swap
    // the compositing order.
    const double depth = 4.0 + 4.0 * (i + 0.15 + 0.7 * unif(rng)) / n_splats;
    const double span = 0.35 * depth * cam.width / cam.fx;
    g.mu = Vec3(span * (unif(rng) - 0.5), span * (unif(rng) - 0.5), depth);
    const Vec3 axis =
        Vec3(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5).normalized();
    const double angle = unif(rng) * M_PI;
    g.q = Quat(std::cos(angle / 2), axis.x() * std::sin(angle / 2),
               axis.y() * std::sin(angle / 2), axis.z() * std::sin(angle / 2));
    g.s = Vec3(0.1 + 0.2 * unif(rng), 0.1 + 0.2 * unif(rng),
               0.1 + 0.2 * unif(rng));
    g.opacity = 0.05 + 0.25 * unif(rng);
    g.color = Vec3(0.1 + 0.8 * unif(rng), 0.1 + 0.8 * unif(rng),
                   0.1 + 0.8 * unif(rng));
    g.label = 1 + static_cast<int>(rng() % 3);
    scene.push_back(g);
  }
  return scene;
}

}  // namespace dsplat::oracle
