// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/prompt.hpp"

namespace ids {

std::string PromptBundle::text() const {
  std::string out = instruction + "\n\n";
  if (!demos_block.empty()) out += demos_block + "\n\n";
  out += format_line + "\n";
  out += test_block + "\n";
  out += cot_trigger;
  return out;
}

namespace triggers {

std::optional<std::string> resolve(const std::string& name) {
  if (name == "default") return std::string(kDefault);
  if (name == "trigger1") return std::string(kTrigger1);
  if (name == "trigger2") return std::string(kTrigger2);
  if (name.rfind("custom:", 0) == 0) return name.substr(7);
  return std::nullopt;
}

}  // namespace triggers

PromptBundle render_prompt(const TaskKind& task, std::span<const Example> demos,
                           const Example& query, PromptMode mode, const std::string& trigger) {
  if (trim(query.input_text).empty()) throw Error("render_prompt: query text empty");
  if (mode == PromptMode::zero_shot_cot && !demos.empty())
    throw Error("render_prompt: zero-shot mode takes no demonstrations");
  if (mode == PromptMode::icl_with_cot && demos.empty())
    throw Error("render_prompt: ICL mode needs at least one demonstration");

  PromptBundle b;
  b.instruction = task.instruction;
  b.format_line = task.answer_format_line();
  b.cot_trigger = trigger;

  if (mode == PromptMode::icl_with_cot) {
    b.demos_block = "Examples:";
    for (size_t i = 0; i < demos.size(); ++i) {
      if (i > 0) b.demos_block += "\n";
      b.demos_block += "\n" + task.input_field + ": " + demos[i].input_text;
      b.demos_block += "\n" + task.answer_field + ": " + demos[i].label_text;
    }
    b.test_block = "Here is the test data.\n";
  }
  b.test_block += task.input_field + ": " + query.input_text;
  return b;
}

std::vector<ChatTurn> to_turns(const PromptBundle& bundle, bool system_turn) {
  std::vector<ChatTurn> turns;
  if (system_turn) {
    std::string rest = bundle.text();
    rest.erase(0, bundle.instruction.size() + 2);
    turns.push_back({Role::system, bundle.instruction});
    turns.push_back({Role::user, rest});
  } else {
    turns.push_back({Role::user, bundle.text()});
  }
  return turns;
}

}  // namespace ids
