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

#include "dsplat/core/types.hpp"

namespace dsplat {

// Fully-connected patch critic: flattened patch -> hidden layers with
// leaky-rectifier activations (slope 0.2) -> scalar score. The output layer
// is zero-initialized so an untrained critic scores everything 0 and passes
// no gradient to its input.
class Discriminator {
 public:
  explicit Discriminator(int input_dim = 16 * 16 * 3,
                         std::vector<int> hidden = {128, 64},
                         std::uint64_t seed = 0);

  int input_dim() const { return dims_.front(); }

  double forward(const std::vector<double>& input) const;

  // Score plus gradients scaled by `dscore`. Either gradient sink may be
  // null. `param_grad` must match param_count() and is accumulated into.
  double backward(const std::vector<double>& input, double dscore,
                  std::vector<double>* param_grad,
                  std::vector<double>* input_grad) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  static constexpr double kLeakySlope = 0.2;

 private:
  std::vector<int> dims_;  // layer widths including input and output
  std::vector<double> params_;
  std::vector<std::size_t> weight_offset_;  // per layer
  std::vector<std::size_t> bias_offset_;
};

}  // namespace dsplat
