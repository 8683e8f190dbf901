// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "ids/corpus.hpp"

namespace ids {

// Serialized stand-in for an unparseable answer; real answers are always
// lower-case after normalization so the sentinel cannot collide.
inline constexpr const char* kAbstain = "ABSTAIN";

struct ParsedResponse {
  std::optional<std::string> answer;  // normalized; nullopt = abstain
  std::string reason;                 // never empty
  std::string raw;
};

// Total: never throws. The answer comes from the last "Answer:"/"Topic:"
// marker line; "Reason:" introduces the reasoning path and falls back to the
// whole raw text when absent.
ParsedResponse parse_response(const std::string& raw, const TaskKind& task);

}  // namespace ids
