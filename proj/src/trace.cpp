// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/trace.hpp"

#include <nlohmann/json.hpp>

#include "ids/parse.hpp"

namespace ids {

using nlohmann::json;

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ids: return "ids";
    case Strategy::topk_consistency: return "topk_consistency";
    case Strategy::random_voting: return "random_voting";
    case Strategy::cluster_voting: return "cluster_voting";
    case Strategy::mmr_consistency: return "mmr_consistency";
  }
  return "ids";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "ids") return Strategy::ids;
  if (name == "topk_consistency") return Strategy::topk_consistency;
  if (name == "random_voting") return Strategy::random_voting;
  if (name == "cluster_voting") return Strategy::cluster_voting;
  if (name == "mmr_consistency") return Strategy::mmr_consistency;
  return std::nullopt;
}

namespace {

json answer_to_json(const std::optional<std::string>& a) {
  return a ? json(*a) : json(kAbstain);
}

std::optional<std::string> answer_from_json(const json& j) {
  std::string s = j.get<std::string>();
  if (s == kAbstain) return std::nullopt;
  return s;
}

}  // namespace

json trace_to_json(const IterationTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    steps.push_back({{"reasoning_path_in", s.reasoning_path_in},
                     {"demo_indices", s.demo_indices},
                     {"prompt", s.prompt},
                     {"raw_response", s.raw_response},
                     {"answer", answer_to_json(s.answer)},
                     {"reasoning_path_out", s.reasoning_path_out}});
  }
  json answers = json::array();
  for (const auto& a : t.answer_set) answers.push_back(answer_to_json(a));
  json j{{"query_id", t.query_id},
         {"iterations", steps},
         {"answer_set", answers},
         {"final_answer", answer_to_json(t.final_answer)},
         {"chat_calls", t.chat_calls},
         {"path_embeddings", t.path_embeddings},
         {"aborted", t.aborted}};
  if (!t.error.empty()) j["error"] = t.error;
  if (t.zero_shot) {
    j["zero_shot"] = {{"prompt", t.zero_shot->prompt},
                      {"raw_response", t.zero_shot->raw_response},
                      {"reasoning_path", t.zero_shot->reasoning_path}};
  }
  return j;
}

IterationTrace trace_from_json(const json& j) {
  IterationTrace t;
  t.query_id = j.at("query_id").get<int>();
  if (j.contains("zero_shot")) {
    ZeroShotStep z;
    z.prompt = j["zero_shot"].at("prompt").get<std::string>();
    z.raw_response = j["zero_shot"].at("raw_response").get<std::string>();
    z.reasoning_path = j["zero_shot"].at("reasoning_path").get<std::string>();
    t.zero_shot = std::move(z);
  }
  for (const auto& sj : j.at("iterations")) {
    IterationStep s;
    s.reasoning_path_in = sj.at("reasoning_path_in").get<std::string>();
    s.demo_indices = sj.at("demo_indices").get<std::vector<int>>();
    s.prompt = sj.at("prompt").get<std::string>();
    s.raw_response = sj.at("raw_response").get<std::string>();
    s.answer = answer_from_json(sj.at("answer"));
    s.reasoning_path_out = sj.at("reasoning_path_out").get<std::string>();
    t.steps.push_back(std::move(s));
  }
  for (const auto& aj : j.at("answer_set")) t.answer_set.push_back(answer_from_json(aj));
  t.final_answer = answer_from_json(j.at("final_answer"));
  t.chat_calls = j.at("chat_calls").get<int>();
  t.path_embeddings = j.at("path_embeddings").get<int>();
  t.aborted = j.value("aborted", false);
  t.error = j.value("error", std::string());
  return t;
}

}  // namespace ids
