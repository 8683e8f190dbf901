// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ids/chat.hpp"
#include "ids/corpus.hpp"

namespace ids {

enum class PromptMode { zero_shot_cot, icl_with_cot };

// Rendered prompt sections. `text()` is byte-deterministic given the inputs;
// zero-shot prompts have an empty demos block and omit "Here is the test
// data.". Demonstrations never carry reasoning paths.
struct PromptBundle {
  std::string instruction;
  std::string demos_block;  // "Examples:" block, empty in zero-shot mode
  std::string format_line;
  std::string test_block;
  std::string cot_trigger;

  std::string text() const;
};

namespace triggers {
inline constexpr const char* kDefault = "Let's think step by step.";
inline constexpr const char* kTrigger1 =
    "Let's work this out in a step by step way to be sure we have the right answer.";
inline constexpr const char* kTrigger2 = "Let's solve this problem step by step";

// Accepts "default", "trigger1", "trigger2", or "custom:<text>".
std::optional<std::string> resolve(const std::string& name);
}  // namespace triggers

PromptBundle render_prompt(const TaskKind& task, std::span<const Example> demos,
                           const Example& query, PromptMode mode,
                           const std::string& trigger = triggers::kDefault);

// Single user turn by default; with `system_turn` the instruction moves into
// a system message.
std::vector<ChatTurn> to_turns(const PromptBundle& bundle, bool system_turn = false);

}  // namespace ids
