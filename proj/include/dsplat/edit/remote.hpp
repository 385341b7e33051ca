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

#include "dsplat/edit/editor.hpp"
#include "dsplat/edit/plan.hpp"

namespace dsplat {

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);
std::string sha256_hex(const std::string& data);

struct RemoteConfig {
  std::string base_url;      // e.g. http://host:port
  std::string auth_token;    // sent as a bearer token when non-empty
  std::string cache_dir;     // responses cached by request hash when set
  int timeout_seconds = 120;
  int max_retries = 2;       // exponential backoff between attempts
  int backoff_ms = 250;
};

// POST /edit {image_b64, mask_b64, instruction, seed} -> {image_b64}.
// Responses are validated against the outside-mask contract and rejected on
// violation; valid responses are cached on disk keyed by the request hash.
class RemoteEditor : public ImageEditor {
 public:
  explicit RemoteEditor(RemoteConfig config) : config_(std::move(config)) {}
  std::string name() const override { return "remote:" + config_.base_url; }
  EditResponse edit(const EditRequest& request) const override;

 private:
  RemoteConfig config_;
};

// POST /refine {prompt, labels:[{id,name}]} -> {instructions:[...]} or
// {refusal: reason}.
class RemoteRefiner : public PromptRefiner {
 public:
  explicit RemoteRefiner(RemoteConfig config) : config_(std::move(config)) {}
  std::string name() const override { return "remote:" + config_.base_url; }
  std::pair<std::optional<EditPlan>, std::optional<Refusal>> refine(
      const std::string& prompt,
      const std::vector<LabelInfo>& labels) const override;

 private:
  RemoteConfig config_;
};

// JSON codecs for the wire protocol, shared with test servers.
std::string edit_request_to_json(const EditRequest& request);
EditRequest edit_request_from_json(const std::string& body);
std::string edit_plan_to_json(const EditPlan& plan);
EditPlan edit_plan_from_json(const std::string& body);

// Runs requests through the editor with at most `concurrency` in flight;
// results keep the input order.
std::vector<EditResponse> edit_images_concurrently(
    const std::vector<EditRequest>& requests, const ImageEditor& editor,
    int concurrency = 4);

}  // namespace dsplat
