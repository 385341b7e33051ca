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

#include "dsplat/render/image.hpp"

namespace dsplat {

struct Metrics {
  double psnr = 0.0;  // dB, capped at 99 when MSE < 1e-10
  double ssim = 0.0;
};

double mean_squared_error(const Image3& a, const Image3& b);

// PSNR = 10*log10(1/MSE) for [0,1] images. SSIM uses an 11x11 Gaussian
// window (sigma 1.5), K1 = 0.01, K2 = 0.03, averaged over channels; local
// statistics are taken where the full window fits.
Metrics compute_metrics(const Image3& reference, const Image3& test);

}  // namespace dsplat
