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

#include <optional>
#include <string>
#include <vector>

namespace dsplat {

enum class EditAction { Restyle, Recolor, AddAccessory, Remove };

enum class SideQualifier { None, Left, Right };  // subject frame

// One atomic edit instruction. The target is either a semantic label id or a
// named region resolvable from label geometry (e.g. "ear").
struct EditInstruction {
  EditAction action = EditAction::Restyle;
  int target_label = 0;        // 0 when targeting a named region
  std::string target_region;   // empty when targeting a label
  SideQualifier side = SideQualifier::None;
  std::string style;           // free-text style descriptor
};

struct EditPlan {
  std::vector<EditInstruction> instructions;
};

struct Refusal {
  std::string reason;
};

// Known label name for prompt resolution.
struct LabelInfo {
  int id = 0;
  std::string name;
};

// Prompt refiner boundary (the external LLM stand-in). Implementations must
// either return a plan with resolvable targets or a structured refusal.
class PromptRefiner {
 public:
  virtual ~PromptRefiner() = default;
  virtual std::string name() const = 0;
  // Exactly one of the pair is set.
  virtual std::pair<std::optional<EditPlan>, std::optional<Refusal>> refine(
      const std::string& prompt, const std::vector<LabelInfo>& labels) const = 0;
};

// Deterministic rule-based keyword/position parser.
class MockRefiner : public PromptRefiner {
 public:
  std::string name() const override { return "mock"; }
  std::pair<std::optional<EditPlan>, std::optional<Refusal>> refine(
      const std::string& prompt,
      const std::vector<LabelInfo>& labels) const override;
};

const char* to_string(EditAction action);
const char* to_string(SideQualifier side);

}  // namespace dsplat
