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

#include <memory>
#include <vector>

#include "dsplat/core/types.hpp"
#include "dsplat/render/camera.hpp"
#include "dsplat/render/image.hpp"

namespace dsplat {

// Produces a per-pixel semantic label map from an image. Stand-in boundary
// for an external facial-component identifier.
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual LabelMap segment(const Image3& image) const = 0;
};

// Labels foreground pixels by vertical image band: 1 = upper (hair),
// 2 = middle (face), 3 = lower (neck). Pixels darker than the foreground
// threshold stay 0.
class BandSegmenter : public Segmenter {
 public:
  BandSegmenter(double upper_frac = 0.3, double lower_frac = 0.7,
                double fg_threshold = 0.02)
      : upper_frac_(upper_frac),
        lower_frac_(lower_frac),
        fg_threshold_(fg_threshold) {}

  LabelMap segment(const Image3& image) const override;

 private:
  double upper_frac_;
  double lower_frac_;
  double fg_threshold_;
};

// Sets each splat's label to the majority segmenter label over the pixels
// where the splat is the max-weight contributor. Splats that win no pixel
// get label 0. The multi-view overload accumulates votes across views.
Scene assign_labels(const Scene& scene, const LabelMap& segmenter_mask,
                    const Camera& cam);
Scene assign_labels(const Scene& scene,
                    const std::vector<LabelMap>& segmenter_masks,
                    const std::vector<Camera>& cams);

}  // namespace dsplat
