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

#include "dsplat/core/types.hpp"

namespace dsplat {

// Sigma = R * diag(s) * diag(s) * R^T. Validates the inputs: the quaternion
// must be unit within 1e-6 and all scales strictly positive.
Covariance3 covariance_from_params(const Quat& q, const Vec3& s);

// Unvalidated fast path used by the renderer on already-normalized data.
Mat3 covariance_matrix(const Quat& unit_q, const Vec3& s);

// exp(-1/2 (x-mu)^T Sigma^-1 (x-mu)); 1 iff x == mu. Rejects covariances
// with condition number above 1e12.
double gaussian_eval(const Vec3& mu, const Covariance3& sigma, const Vec3& x);

}  // namespace dsplat
