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
#include <vector>

#include "dsplat/render/image.hpp"
#include "dsplat/render/renderer.hpp"

namespace dsplat {

// 8-bit RGB PNG; values quantized with round(255 * clamp(v, 0, 1)).
void write_png(const std::string& path, const Image3& img);
Image3 read_png(const std::string& path);

// 8-bit grayscale PNG, 255 = inside region.
void write_mask_png(const std::string& path, const Mask& mask);
Mask read_mask_png(const std::string& path);

// 8-bit grayscale PNG holding raw label ids.
void write_label_png(const std::string& path, const LabelMap& labels);
LabelMap read_label_png(const std::string& path);

// Binary P6 PPM with the same 0-255 quantization as the PNG writer.
void write_ppm(const std::string& path, const Image3& img);
Image3 read_ppm(const std::string& path);

// In-memory PNG encode/decode used by the edit-service wire protocol.
std::vector<std::uint8_t> encode_png(const Image3& img);
Image3 decode_png(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_mask_png(const Mask& mask);
Mask decode_mask_png(const std::vector<std::uint8_t>& bytes);

}  // namespace dsplat
