// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ids/chat.hpp"
#include "ids/corpus.hpp"
#include "ids/embedding.hpp"
#include "ids/prompt.hpp"
#include "ids/selectors.hpp"
#include "ids/trace.hpp"

namespace ids {

struct RunConfig {
  Strategy strategy = Strategy::ids;
  int k = 4;
  int q = 3;
  GenerationParams generation;
  uint64_t seed = 0;
  double mmr_lambda = 0.5;
  KMeansConfig kmeans;
  std::string trigger = triggers::kDefault;
  bool system_turn = false;
  bool embed_labels = false;  // include gold labels in training-example embedding text
  int parallel = 4;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

struct Providers {
  ChatProvider& chat;
  EmbeddingProvider& embed;
  EmbeddingCache& cache;
  CompletionPolicy completion;
};

// Text a training example is embedded under: the input only by default, so
// selection keys on sample content rather than gold labels.
std::string embedding_text(const Example& ex, const RunConfig& cfg);

// Per-run materialization of training-set embeddings, computed once and
// shared across query workers (aligned with dataset.train).
std::vector<EmbeddingVector> embed_training_set(const Dataset& dataset, Providers& providers,
                                                const RunConfig& cfg);

// Most frequent non-abstained answer; ties break to the answer whose first
// occurrence has the smallest iteration index. All-abstain yields abstain.
std::optional<std::string> majority_vote(const std::vector<std::optional<std::string>>& answers);

// One zero-shot CoT call, then q iterations of: embed the current reasoning
// path, select the top-k most similar training examples, run ICL with CoT,
// parse, and carry the new reasoning path forward. The final answer is the
// majority vote over the q answers.
IterationTrace run_ids(const Example& query, const Dataset& dataset,
                       std::span<const EmbeddingVector> train_vecs, Providers& providers,
                       const RunConfig& cfg);

// Self-consistency baselines: topk/mmr select once from the query embedding
// and sample q completions; random/cluster draw a fresh selection per run.
// `cluster_reps` carries the per-run cluster representatives (cluster_voting
// only, one DemonstrationSet per iteration).
IterationTrace run_baseline(const Example& query, const Dataset& dataset,
                            std::span<const EmbeddingVector> train_vecs, Providers& providers,
                            const RunConfig& cfg,
                            std::span<const DemonstrationSet> cluster_reps = {});

struct EvalResult {
  double accuracy = 0.0;
  int correct = 0;
  int wrong = 0;
  int abstained = 0;
};

// Exact-match accuracy: mean Kronecker delta between the voted final answer
// and the normalized gold label. Abstentions count as wrong.
EvalResult evaluate(const std::vector<IterationTrace>& traces, const std::vector<Example>& test,
                    const TaskKind& task);

struct RunOutcome {
  std::vector<IterationTrace> traces;  // sorted by query id
  EvalResult eval;
  nlohmann::json metrics;
  bool any_aborted = false;
};

// Full experiment over dataset.test. Persists config.json, traces.jsonl and
// metrics.json under run_dir; with `resume`, queries already present in
// traces.jsonl are not re-run. Queries run in up to cfg.parallel workers;
// each query's iteration loop is sequential. `extra_config` is merged into
// the persisted config.json (the CLI stores its resolved flags there).
RunOutcome run_experiment(const Dataset& dataset, Providers& providers, const RunConfig& cfg,
                          const std::filesystem::path& run_dir, bool resume = false,
                          const nlohmann::json* extra_config = nullptr);

}  // namespace ids
