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

#include "dsplat/optim/adam.hpp"

#include <cmath>

#include "dsplat/core/check.hpp"

namespace dsplat {

double LrSchedule::lr(std::int64_t step) const {
  if (total_steps <= 0) return lr_start;
  const double t = std::min(1.0, static_cast<double>(step) / total_steps);
  return lr_start * std::pow(lr_end / lr_start, t);
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state) {
  DS_CHECK(params.size() == grads.size(), Layout,
           "parameter and gradient lengths differ");
  DS_CHECK(state.m.size() == params.size() && state.v.size() == params.size(),
           Layout, "optimizer state length does not match the parameters");

  const double lr = state.schedule.lr(state.step);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

}  // namespace dsplat
