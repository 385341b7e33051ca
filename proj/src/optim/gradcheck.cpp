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

#include "dsplat/optim/gradcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dsplat/optim/backward.hpp"

namespace dsplat {

const std::array<const char*, 5>& GradCheckReport::class_names() {
  static const std::array<const char*, 5> names = {
      "position", "rotation", "scale", "opacity", "color"};
  return names;
}

namespace {

// Well-conditioned random scene: separated depths (finite differences must
// not swap the compositing order), screen footprints of a few pixels,
// opacities low enough that the early-exit transmittance threshold is
// unreachable, interior colors.
Scene gradcheck_scene(std::mt19937_64& rng, int n_splats, const Camera& cam) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Scene scene;
  for (int i = 0; i < n_splats; ++i) {
    GaussianSplat g;
    const double depth = 4.0 + 4.0 * (i + 0.15 + 0.7 * unif(rng)) / n_splats;
    const double span = 0.35 * depth * cam.width / cam.fx;
    g.mu = Vec3(span * (unif(rng) - 0.5), span * (unif(rng) - 0.5), depth);
    const Vec3 axis =
        Vec3(unif(rng) - 0.5, unif(rng) - 0.5, unif(rng) - 0.5).normalized();
    const double angle = unif(rng) * M_PI;
    g.q = Quat(std::cos(angle / 2), axis.x() * std::sin(angle / 2),
               axis.y() * std::sin(angle / 2), axis.z() * std::sin(angle / 2));
    g.s = Vec3(0.25 + 0.25 * unif(rng), 0.25 + 0.25 * unif(rng),
               0.25 + 0.25 * unif(rng));
    g.opacity = 0.05 + 0.25 * unif(rng);
    g.color = Vec3(0.1 + 0.8 * unif(rng), 0.1 + 0.8 * unif(rng),
                   0.1 + 0.8 * unif(rng));
    scene.push_back(g);
  }
  return scene;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Camera cam;
  cam.fx = cam.fy = 48.0;
  cam.cx = cam.cy = 12.0;
  cam.width = cam.height = 24;

  GradCheckReport report;
  const double h = config.step;

  for (int s = 0; s < config.scenes; ++s) {
    const Scene scene = gradcheck_scene(rng, config.splats, cam);
    Image3 target(cam.width, cam.height);
    for (double& v : target.data) v = unif(rng);

    BackwardConfig bw;
    bw.weights.lambda_rgb = 1.0;
    bw.weights.lambda_rec = 1.0;
    bw.include_tracking = false;
    BackwardView view;
    view.frame = -1;
    view.camera = &cam;
    view.target = &target;
    const BackwardResult res = backward(scene, nullptr, {}, {view}, bw);

    double gnorm = 0.0;
    for (double g : res.grad.values) gnorm = std::max(gnorm, std::abs(g));
    const double floor = std::max(1e-8, 1e-3 * gnorm);

    ParamVector opt = to_optim_params(scene);
    for (std::size_t k = 0; k < opt.values.size(); ++k) {
      const int field = static_cast<int>(k % ParamVector::kPerSplat);
      const int cls =
          field < 3 ? 0 : (field < 7 ? 1 : (field < 10 ? 2 : (field < 11 ? 3 : 4)));
      const double saved = opt.values[k];
      const auto loss_at = [&](double value) {
        opt.values[k] = value;
        const Scene perturbed = apply_optim_params(opt, scene);
        return backward(perturbed, nullptr, {}, {view}, bw).total;
      };
      const double fd = (loss_at(saved + h) - loss_at(saved - h)) / (2.0 * h);
      opt.values[k] = saved;
      const double an = res.grad.values[k];
      const double rel =
          std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), floor});
      report.max_rel_error[cls] = std::max(report.max_rel_error[cls], rel);
    }
  }

  std::ostringstream os;
  for (int c = 0; c < 5; ++c) {
    os << GradCheckReport::class_names()[c] << ": max relative error "
       << report.max_rel_error[c] << "\n";
    report.overall = std::max(report.overall, report.max_rel_error[c]);
  }
  report.pass = report.overall < config.tolerance;
  os << "overall: " << report.overall << (report.pass ? " (pass)" : " (FAIL)")
     << "\n";
  report.text = os.str();
  return report;
}

}  // namespace dsplat
