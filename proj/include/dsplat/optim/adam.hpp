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

#include <cstdint>
#include <vector>

namespace dsplat {

// Exponential decay from lr_start at step 0 to lr_end at step total_steps.
struct LrSchedule {
  double lr_start = 1e-3;
  double lr_end = 1e-5;
  std::int64_t total_steps = 1;

  double lr(std::int64_t step) const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  LrSchedule schedule;

  void resize(std::size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  }
};

// Standard Adam update with bias correction; the learning rate follows the
// state's schedule at the current step.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state);

}  // namespace dsplat
