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

#include "dsplat/rig/labels.hpp"

#include <map>

#include "dsplat/core/check.hpp"
#include "dsplat/render/renderer.hpp"

namespace dsplat {

LabelMap BandSegmenter::segment(const Image3& image) const {
  LabelMap out(image.width, image.height, 0);
  for (int y = 0; y < image.height; ++y) {
    const double frac = image.height > 1
                            ? static_cast<double>(y) / (image.height - 1)
                            : 0.0;
    const int band = frac < upper_frac_ ? 1 : (frac < lower_frac_ ? 2 : 3);
    for (int x = 0; x < image.width; ++x) {
      const Vec3 c = image.at(x, y);
      const double luma = 0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2];
      if (luma > fg_threshold_) out.at(x, y) = band;
    }
  }
  return out;
}

Scene assign_labels(const Scene& scene,
                    const std::vector<LabelMap>& segmenter_masks,
                    const std::vector<Camera>& cams) {
  DS_CHECK(segmenter_masks.size() == cams.size(), InvalidParameter,
           "one segmenter mask per camera required");
  std::vector<std::map<int, int>> votes(scene.size());
  RenderConfig cfg;
  cfg.keep_records = false;
  for (std::size_t v = 0; v < cams.size(); ++v) {
    const LabelMap& seg = segmenter_masks[v];
    DS_CHECK(seg.width == cams[v].width && seg.height == cams[v].height,
             InvalidParameter, "segmenter mask does not match the camera");
    const RenderOutput out = render(scene, cams[v], cfg);
    for (int y = 0; y < seg.height; ++y) {
      for (int x = 0; x < seg.width; ++x) {
        const int winner =
            out.argmax_splat[static_cast<std::size_t>(y) * seg.width + x];
        if (winner >= 0) ++votes[winner][seg.at(x, y)];
      }
    }
  }

  Scene labeled = scene;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    int best_label = 0, best_count = 0;
    for (const auto& [label, count] : votes[i]) {
      if (count > best_count) {  // ties keep the smaller label id
        best_count = count;
        best_label = label;
      }
    }
    labeled[i].label = best_label;
  }
  return labeled;
}

Scene assign_labels(const Scene& scene, const LabelMap& segmenter_mask,
                    const Camera& cam) {
  return assign_labels(scene, std::vector<LabelMap>{segmenter_mask},
                       std::vector<Camera>{cam});
}

}  // namespace dsplat
