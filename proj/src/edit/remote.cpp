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

#include "dsplat/edit/remote.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dsplat/core/check.hpp"
#include "dsplat/io/image_io.hpp"

namespace dsplat {

namespace fs = std::filesystem;
using nlohmann::json;

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.resize(4 * ((bytes.size() + 2) / 3) + 1);
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(n);
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out(3 * (text.size() / 4) + 3);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  DS_CHECK(n >= 0, Service, "invalid base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  for (auto it = text.rbegin(); it != text.rend() && *it == '='; ++it) --len;
  out.resize(len);
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string edit_request_to_json(const EditRequest& request) {
  json body;
  body["image_b64"] = base64_encode(encode_png(request.image));
  body["mask_b64"] = base64_encode(encode_mask_png(request.mask));
  body["instruction"] = request.instruction;
  body["seed"] = request.seed;
  return body.dump();
}

EditRequest edit_request_from_json(const std::string& text) {
  const json body = json::parse(text);
  EditRequest req;
  req.image = decode_png(base64_decode(body.at("image_b64").get<std::string>()));
  req.mask = decode_mask_png(base64_decode(body.at("mask_b64").get<std::string>()));
  req.instruction = body.at("instruction").get<std::string>();
  req.seed = body.value("seed", 0ull);
  return req;
}

std::string edit_plan_to_json(const EditPlan& plan) {
  json body;
  body["instructions"] = json::array();
  for (const EditInstruction& ins : plan.instructions) {
    json ji;
    ji["action"] = to_string(ins.action);
    ji["target_label"] = ins.target_label;
    ji["target_region"] = ins.target_region;
    ji["side"] = to_string(ins.side);
    ji["style"] = ins.style;
    body["instructions"].push_back(ji);
  }
  return body.dump();
}

EditPlan edit_plan_from_json(const std::string& text) {
  const json body = json::parse(text);
  EditPlan plan;
  DS_CHECK(body.contains("instructions") && body["instructions"].is_array() &&
               !body["instructions"].empty(),
           Service, "plan carries no instructions");
  for (const json& ji : body["instructions"]) {
    EditInstruction ins;
    const std::string action = ji.at("action").get<std::string>();
    if (action == "restyle")
      ins.action = EditAction::Restyle;
    else if (action == "recolor")
      ins.action = EditAction::Recolor;
    else if (action == "add-accessory")
      ins.action = EditAction::AddAccessory;
    else if (action == "remove")
      ins.action = EditAction::Remove;
    else
      throw Error(ErrorKind::Service, "unknown edit action: " + action);
    ins.target_label = ji.value("target_label", 0);
    ins.target_region = ji.value("target_region", std::string());
    const std::string side = ji.value("side", "none");
    ins.side = side == "left"
                   ? SideQualifier::Left
                   : (side == "right" ? SideQualifier::Right : SideQualifier::None);
    ins.style = ji.value("style", std::string());
    DS_CHECK(ins.target_label != 0 || !ins.target_region.empty(), Service,
             "plan instruction has no resolvable target");
    plan.instructions.push_back(std::move(ins));
  }
  return plan;
}

namespace {

struct HttpResult {
  bool ok = false;
  int status = 0;
  std::string body;
  std::string error;
};

HttpResult post_with_retries(const RemoteConfig& config, const std::string& path,
                             const std::string& body) {
  HttpResult result;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
    httplib::Client client(config.base_url);
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config.auth_token.empty())
      headers.emplace("Authorization", "Bearer " + config.auth_token);
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      result.error = "transport error: " + httplib::to_string(res.error());
      continue;  // retryable
    }
    result.status = res->status;
    result.body = res->body;
    if (res->status >= 200 && res->status < 300) {
      result.ok = true;
      return result;
    }
    result.error = "http " + std::to_string(res->status);
    if (res->status < 500) return result;  // only server errors retry
  }
  return result;
}

}  // namespace

EditResponse RemoteEditor::edit(const EditRequest& request) const {
  const std::string body = edit_request_to_json(request);
  const std::string key = sha256_hex(body);

  std::string cache_file;
  if (!config_.cache_dir.empty()) {
    fs::create_directories(config_.cache_dir);
    cache_file = (fs::path(config_.cache_dir) / (key + ".png")).string();
    if (fs::exists(cache_file)) {
      EditResponse resp;
      resp.image = read_png(cache_file);
      resp.ok = true;
      resp.status = "ok (cached)";
      return resp;
    }
  }

  const HttpResult http = post_with_retries(config_, "/edit", body);
  EditResponse resp;
  if (!http.ok) {
    resp.status = "edit service failed: " + http.error +
                  (http.body.empty() ? "" : "; body: " + http.body);
    return resp;
  }
  try {
    const json doc = json::parse(http.body);
    resp.image = decode_png(base64_decode(doc.at("image_b64").get<std::string>()));
  } catch (const std::exception& e) {
    resp.status = std::string("malformed edit response: ") + e.what();
    return resp;
  }
  if (!resp.image.same_size(request.image)) {
    resp.status = "remote editor returned mismatched dimensions";
    return resp;
  }
  if (!respects_mask_contract(request.image, resp.image, request.mask)) {
    resp.status = "remote editor violated the outside-mask contract";
    return resp;
  }
  resp.ok = true;
  resp.status = "ok";
  if (!cache_file.empty()) write_png(cache_file, resp.image);
  return resp;
}

std::pair<std::optional<EditPlan>, std::optional<Refusal>> RemoteRefiner::refine(
    const std::string& prompt, const std::vector<LabelInfo>& labels) const {
  json body;
  body["prompt"] = prompt;
  body["labels"] = json::array();
  for (const LabelInfo& l : labels)
    body["labels"].push_back({{"id", l.id}, {"name", l.name}});

  const HttpResult http = post_with_retries(config_, "/refine", body.dump());
  if (!http.ok)
    return {std::nullopt, Refusal{"refine service failed: " + http.error}};
  try {
    const json doc = json::parse(http.body);
    if (doc.contains("refusal"))
      return {std::nullopt, Refusal{doc["refusal"].get<std::string>()}};
    return {edit_plan_from_json(http.body), std::nullopt};
  } catch (const std::exception& e) {
    return {std::nullopt, Refusal{std::string("malformed plan: ") + e.what()}};
  }
}

std::vector<EditResponse> edit_images_concurrently(
    const std::vector<EditRequest>& requests, const ImageEditor& editor,
    int concurrency) {
  DS_CHECK(concurrency > 0, InvalidParameter, "concurrency must be positive");
  std::vector<EditResponse> responses(requests.size());
  std::atomic<std::size_t> next{0};
  const int workers =
      std::min<std::size_t>(concurrency, std::max<std::size_t>(1, requests.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) break;
        try {
          responses[i] = edit_image(requests[i], editor);
        } catch (const std::exception& e) {
          responses[i].ok = false;
          responses[i].status = e.what();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return responses;
}

}  // namespace dsplat
