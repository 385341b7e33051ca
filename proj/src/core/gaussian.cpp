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

#include "dsplat/core/gaussian.hpp"

#include <cmath>

#include "dsplat/core/check.hpp"

namespace dsplat {

Mat3 quat_to_matrix(const Quat& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Quat matrix_to_quat(const Mat3& r) {
  Eigen::Quaterniond eq(r);
  eq.normalize();
  Quat q(eq.w(), eq.x(), eq.y(), eq.z());
  // Fix the sign so the scalar part is non-negative; both signs encode the
  // same rotation.
  if (q[0] < 0.0) q = -q;
  return q;
}

Covariance3 covariance_from_params(const Quat& q, const Vec3& s) {
  DS_CHECK(std::abs(q.norm() - 1.0) <= 1e-6, InvalidParameter,
           "quaternion must be unit");
  DS_CHECK(s.minCoeff() > 0.0, InvalidParameter,
           "scale components must be positive");
  return Covariance3{covariance_matrix(quat_normalized(q), s)};
}

Mat3 covariance_matrix(const Quat& unit_q, const Vec3& s) {
  const Mat3 r = quat_to_matrix(unit_q);
  const Mat3 rs = r * s.asDiagonal();
  return rs * rs.transpose();
}

double gaussian_eval(const Vec3& mu, const Covariance3& sigma, const Vec3& x) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(sigma.sigma);
  const Vec3 ev = es.eigenvalues();
  DS_CHECK(ev.minCoeff() > 0.0 && ev.maxCoeff() / ev.minCoeff() < 1e12,
           DegenerateCovariance, "covariance is singular or ill-conditioned");
  const Vec3 d = x - mu;
  const double m = d.dot(sigma.sigma.ldlt().solve(d));
  return std::exp(-0.5 * m);
}

}  // namespace dsplat
