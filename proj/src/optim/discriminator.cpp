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

#include "dsplat/optim/discriminator.hpp"

#include <cmath>
#include <random>

#include "dsplat/core/check.hpp"

namespace dsplat {

Discriminator::Discriminator(int input_dim, std::vector<int> hidden,
                             std::uint64_t seed) {
  DS_CHECK(input_dim > 0, InvalidParameter, "input dimension must be positive");
  dims_.push_back(input_dim);
  for (int h : hidden) {
    DS_CHECK(h > 0, InvalidParameter, "hidden width must be positive");
    dims_.push_back(h);
  }
  dims_.push_back(1);

  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weight_offset_.push_back(total);
    total += static_cast<std::size_t>(dims_[l]) * dims_[l + 1];
    bias_offset_.push_back(total);
    total += dims_[l + 1];
  }
  params_.assign(total, 0.0);

  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 2 < dims_.size(); ++l) {
    // He-style uniform init for the hidden layers; output layer stays zero.
    const double bound = std::sqrt(6.0 / dims_[l]);
    std::uniform_real_distribution<double> unif(-bound, bound);
    const std::size_t n = static_cast<std::size_t>(dims_[l]) * dims_[l + 1];
    for (std::size_t i = 0; i < n; ++i) params_[weight_offset_[l] + i] = unif(rng);
  }
}

double Discriminator::forward(const std::vector<double>& input) const {
  return backward(input, 0.0, nullptr, nullptr);
}

double Discriminator::backward(const std::vector<double>& input, double dscore,
                               std::vector<double>* param_grad,
                               std::vector<double>* input_grad) const {
  DS_CHECK(input.size() == static_cast<std::size_t>(dims_.front()),
           InvalidParameter, "input size does not match the network");
  if (param_grad)
    DS_CHECK(param_grad->size() == params_.size(), InvalidParameter,
             "parameter gradient size mismatch");

  const std::size_t n_layers = dims_.size() - 1;
  std::vector<std::vector<double>> pre(n_layers);   // pre-activations
  std::vector<std::vector<double>> act(n_layers + 1);
  act[0] = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in_n = dims_[l], out_n = dims_[l + 1];
    pre[l].assign(out_n, 0.0);
    const double* w = params_.data() + weight_offset_[l];
    const double* b = params_.data() + bias_offset_[l];
    for (int o = 0; o < out_n; ++o) {
      double sum = b[o];
      const double* row = w + static_cast<std::size_t>(o) * in_n;
      for (int i = 0; i < in_n; ++i) sum += row[i] * act[l][i];
      pre[l][o] = sum;
    }
    act[l + 1].assign(out_n, 0.0);
    const bool last = l + 1 == n_layers;
    for (int o = 0; o < out_n; ++o)
      act[l + 1][o] = last || pre[l][o] >= 0.0 ? pre[l][o]
                                               : kLeakySlope * pre[l][o];
  }
  const double score = act[n_layers][0];
  if (dscore == 0.0 || (!param_grad && !input_grad)) return score;

  std::vector<double> delta{dscore};
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in_n = dims_[l], out_n = dims_[l + 1];
    const double* w = params_.data() + weight_offset_[l];
    if (param_grad) {
      double* gw = param_grad->data() + weight_offset_[l];
      double* gb = param_grad->data() + bias_offset_[l];
      for (int o = 0; o < out_n; ++o) {
        gb[o] += delta[o];
        double* row = gw + static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) row[i] += delta[o] * act[l][i];
      }
    }
    if (l == 0 && !input_grad) break;
    std::vector<double> prev(in_n, 0.0);
    for (int o = 0; o < out_n; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * in_n;
      for (int i = 0; i < in_n; ++i) prev[i] += delta[o] * row[i];
    }
    if (l > 0) {
      for (int i = 0; i < in_n; ++i)
        if (pre[l - 1][i] < 0.0) prev[i] *= kLeakySlope;
    }
    delta = std::move(prev);
  }
  if (input_grad) *input_grad = std::move(delta);
  return score;
}

}  // namespace dsplat
