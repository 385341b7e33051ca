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
#include <string>

#include "dsplat/render/image.hpp"
#include "dsplat/render/renderer.hpp"

namespace dsplat {

struct EditRequest {
  Image3 image;
  Mask mask;               // true = editable region
  std::string instruction;
  std::uint64_t seed = 0;
};

struct EditResponse {
  Image3 image;
  bool ok = false;
  std::string status;  // "ok" or an error description
};

// Conforming editors return an image of identical dimensions and leave
// pixels outside the mask within 2/255 of the source per channel.
constexpr double kOutsideMaskTolerance = 2.0 / 255.0;

class ImageEditor {
 public:
  virtual ~ImageEditor() = default;
  virtual std::string name() const = 0;
  virtual EditResponse edit(const EditRequest& request) const = 0;
};

// Deterministic in-mask transforms keyed by the instruction text:
//   recolor (+ color name or hue+N/hue-N)  -> hue shift / hue set
//   restyle                                -> contrast curve
//   add-accessory / wear                   -> procedural sprite at the mask
//                                             centroid
//   remove                                 -> fill with the mean color of a
//                                             ring just outside the mask
// Outside-mask pixels are bit-identical to the source.
class MockEditor : public ImageEditor {
 public:
  std::string name() const override { return "mock"; }
  EditResponse edit(const EditRequest& request) const override;
};

// Validates the outside-mask contract; used for both mock and remote
// responses.
bool respects_mask_contract(const Image3& source, const Image3& edited,
                            const Mask& mask, double tolerance = kOutsideMaskTolerance);

// Dimension checks plus delegation to the editor; non-conforming responses
// come back with ok = false.
EditResponse edit_image(const EditRequest& request, const ImageEditor& editor);

}  // namespace dsplat
