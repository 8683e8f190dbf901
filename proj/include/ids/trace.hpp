// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ids {

enum class Strategy {
  ids,
  topk_consistency,
  random_voting,
  cluster_voting,
  mmr_consistency,
};

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& name);

struct ZeroShotStep {
  std::string prompt;
  std::string raw_response;
  std::string reasoning_path;
};

struct IterationStep {
  std::string reasoning_path_in;      // empty for baseline strategies
  std::vector<int> demo_indices;      // train example ids
  std::string prompt;
  std::string raw_response;
  std::optional<std::string> answer;  // normalized; nullopt = abstain
  std::string reasoning_path_out;
};

// Full per-query record: the zero-shot step (IDS only), the q ICL
// iterations, the answer set, and the voted final answer.
struct IterationTrace {
  int query_id = 0;
  std::optional<ZeroShotStep> zero_shot;
  std::vector<IterationStep> steps;
  std::vector<std::optional<std::string>> answer_set;
  std::optional<std::string> final_answer;
  int chat_calls = 0;
  int path_embeddings = 0;
  bool aborted = false;
  std::string error;
};

nlohmann::json trace_to_json(const IterationTrace& trace);
IterationTrace trace_from_json(const nlohmann::json& j);

}  // namespace ids
