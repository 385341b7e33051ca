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

#include "dsplat/edit/plan.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dsplat {

const char* to_string(EditAction action) {
  switch (action) {
    case EditAction::Restyle: return "restyle";
    case EditAction::Recolor: return "recolor";
    case EditAction::AddAccessory: return "add-accessory";
    case EditAction::Remove: return "remove";
  }
  return "unknown";
}

const char* to_string(SideQualifier side) {
  switch (side) {
    case SideQualifier::None: return "none";
    case SideQualifier::Left: return "left";
    case SideQualifier::Right: return "right";
  }
  return "unknown";
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string token;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        c == ':') {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!token.empty()) {
      tokens.push_back(std::move(token));
      token.clear();
    }
  }
  if (!token.empty()) tokens.push_back(std::move(token));
  return tokens;
}

bool contains(const std::vector<std::string>& tokens, const char* word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

const char* const kColorWords[] = {"red",    "green", "blue",   "yellow",
                                   "orange", "purple", "magenta", "cyan",
                                   "pink",   "white",  "black",  "gray"};

const char* const kAccessoryWords[] = {"earring", "ring", "hat", "glasses",
                                       "necklace", "crown"};

// Regions the geometric resolver understands beyond the dataset labels.
const char* const kNamedRegions[] = {"ear", "cheek"};

}  // namespace

std::pair<std::optional<EditPlan>, std::optional<Refusal>> MockRefiner::refine(
    const std::string& prompt, const std::vector<LabelInfo>& labels) const {
  const std::vector<std::string> tokens = tokenize(prompt);
  if (tokens.empty())
    return {std::nullopt, Refusal{"empty prompt"}};

  EditInstruction ins;

  if (contains(tokens, "left")) ins.side = SideQualifier::Left;
  if (contains(tokens, "right")) ins.side = SideQualifier::Right;

  // Action keywords, most specific first.
  std::string accessory;
  for (const char* w : kAccessoryWords)
    if (contains(tokens, w)) accessory = w;
  std::string color;
  for (const char* w : kColorWords)
    if (contains(tokens, w)) color = w;
  std::string hue_shift;
  for (const std::string& t : tokens)
    if (t.rfind("hue+", 0) == 0 || t.rfind("hue-", 0) == 0 ||
        t.rfind("hue:", 0) == 0)
      hue_shift = t;

  if (!accessory.empty() || contains(tokens, "wear") || contains(tokens, "add")) {
    ins.action = EditAction::AddAccessory;
    ins.style = accessory.empty() ? "accessory" : accessory;
  } else if (contains(tokens, "remove") || contains(tokens, "erase")) {
    ins.action = EditAction::Remove;
  } else if (contains(tokens, "recolor") || contains(tokens, "color") ||
             !hue_shift.empty() ||
             (!color.empty() && !contains(tokens, "older"))) {
    ins.action = EditAction::Recolor;
    ins.style = !hue_shift.empty() ? hue_shift : color;
    if (ins.style.empty())
      return {std::nullopt, Refusal{"recolor prompt names no color"}};
  } else if (contains(tokens, "older") || contains(tokens, "younger") ||
             contains(tokens, "turn") || contains(tokens, "style") ||
             contains(tokens, "into") || contains(tokens, "restyle")) {
    ins.action = EditAction::Restyle;
    std::ostringstream style;
    for (const std::string& t : tokens) style << t << " ";
    ins.style = style.str();
  } else {
    return {std::nullopt, Refusal{"no recognizable edit action in prompt"}};
  }

  // Target resolution: dataset label names first, then named regions.
  for (const LabelInfo& label : labels) {
    std::string lname = label.name;
    std::transform(lname.begin(), lname.end(), lname.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    if (contains(tokens, lname.c_str())) {
      ins.target_label = label.id;
      break;
    }
  }
  if (ins.target_label == 0) {
    for (const char* region : kNamedRegions) {
      if (contains(tokens, region)) {
        ins.target_region = region;
        break;
      }
    }
  }
  if (ins.target_label == 0 && ins.target_region.empty()) {
    // Head-level prompts fall back to the face label when one exists.
    const bool head_prompt = contains(tokens, "man") || contains(tokens, "woman") ||
                             contains(tokens, "face") || contains(tokens, "head") ||
                             contains(tokens, "him") || contains(tokens, "her");
    if (head_prompt) {
      for (const LabelInfo& label : labels)
        if (label.name == "face") ins.target_label = label.id;
      if (ins.target_label == 0 && !labels.empty())
        ins.target_label = labels.front().id;
    }
  }
  if (ins.target_label == 0 && ins.target_region.empty())
    return {std::nullopt, Refusal{"prompt target could not be resolved"}};

  EditPlan plan;
  plan.instructions.push_back(std::move(ins));
  return {plan, std::nullopt};
}

}  // namespace dsplat
