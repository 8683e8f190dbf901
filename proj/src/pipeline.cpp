// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/pipeline.hpp"

#include <nlohmann/json.hpp>
#include <omp.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ids/metrics.hpp"
#include "ids/parse.hpp"

namespace ids {

using nlohmann::json;

json RunConfig::to_json() const {
  return json{{"strategy", strategy_name(strategy)},
              {"k", k},
              {"q", q},
              {"seed", seed},
              {"mmr_lambda", mmr_lambda},
              {"kmeans", {{"max_iters", kmeans.max_iters}, {"tol", kmeans.tol}}},
              {"trigger", trigger},
              {"system_turn", system_turn},
              {"embed_labels", embed_labels},
              {"parallel", parallel},
              {"generation",
               {{"temperature", generation.temperature},
                {"max_tokens", generation.max_tokens},
                {"top_p", generation.top_p},
                {"model_id", generation.model_id}}}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  if (auto s = parse_strategy(j.at("strategy").get<std::string>())) cfg.strategy = *s;
  cfg.k = j.at("k").get<int>();
  cfg.q = j.at("q").get<int>();
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.mmr_lambda = j.value("mmr_lambda", 0.5);
  if (j.contains("kmeans")) {
    cfg.kmeans.max_iters = j["kmeans"].value("max_iters", 100);
    cfg.kmeans.tol = j["kmeans"].value("tol", 1e-6);
  }
  cfg.trigger = j.value("trigger", std::string(triggers::kDefault));
  cfg.system_turn = j.value("system_turn", false);
  cfg.embed_labels = j.value("embed_labels", false);
  cfg.parallel = j.value("parallel", 4);
  if (j.contains("generation")) {
    const auto& g = j["generation"];
    cfg.generation.temperature = g.value("temperature", 0.7);
    cfg.generation.max_tokens = g.value("max_tokens", 1024);
    cfg.generation.top_p = g.value("top_p", 1.0);
    cfg.generation.model_id = g.value("model_id", std::string("gpt-3.5-turbo"));
  }
  return cfg;
}

std::string embedding_text(const Example& ex, const RunConfig& cfg) {
  if (cfg.embed_labels) return ex.input_text + "\n" + ex.label_text;
  return ex.input_text;
}

std::vector<EmbeddingVector> embed_training_set(const Dataset& dataset, Providers& providers,
                                                const RunConfig& cfg) {
  std::vector<std::string> texts;
  texts.reserve(dataset.train.size());
  for (const auto& ex : dataset.train) texts.push_back(embedding_text(ex, cfg));
  return embed(providers.embed, providers.cache, texts);
}

std::optional<std::string> majority_vote(const std::vector<std::optional<std::string>>& answers) {
  if (answers.empty()) throw Error("majority_vote: empty answer list");
  std::unordered_map<std::string, int> counts;
  std::unordered_map<std::string, size_t> first_seen;
  for (size_t i = 0; i < answers.size(); ++i) {
    if (!answers[i]) continue;
    auto [it, inserted] = first_seen.emplace(*answers[i], i);
    (void)it;
    (void)inserted;
    ++counts[*answers[i]];
  }
  if (counts.empty()) return std::nullopt;
  std::optional<std::string> best;
  int best_count = 0;
  size_t best_first = 0;
  for (const auto& [answer, count] : counts) {
    size_t first = first_seen.at(answer);
    if (!best || count > best_count || (count == best_count && first < best_first)) {
      best = answer;
      best_count = count;
      best_first = first;
    }
  }
  return best;
}

namespace {

struct IclCallResult {
  std::string prompt;
  std::string raw;
  std::vector<int> demo_positions;  // positions into dataset.train after any shedding
};

// Renders and completes one ICL call. On a context-length rejection the
// least-similar demonstration is dropped and the prompt re-rendered, down to
// a single demonstration.
IclCallResult icl_call(const Example& query, const Dataset& dataset,
                       const std::vector<int>& demo_positions, Providers& providers,
                       const RunConfig& cfg) {
  std::vector<int> positions = demo_positions;
  for (;;) {
    std::vector<Example> demos;
    demos.reserve(positions.size());
    for (int pos : positions) demos.push_back(dataset.train[static_cast<size_t>(pos)]);
    PromptBundle bundle =
        render_prompt(dataset.task, demos, query, PromptMode::icl_with_cot, cfg.trigger);
    ChatRequest req;
    req.turns = to_turns(bundle, cfg.system_turn);
    req.params = cfg.generation;
    req.tag = std::to_string(query.id);
    try {
      IclCallResult res;
      res.raw = complete(providers.chat, req, providers.completion);
      res.prompt = bundle.text();
      res.demo_positions = positions;
      return res;
    } catch (const ContextLengthError&) {
      if (positions.size() <= 1) throw;
      positions.pop_back();
    }
  }
}

std::vector<int> to_ids(const Dataset& dataset, const std::vector<int>& positions) {
  std::vector<int> ids;
  ids.reserve(positions.size());
  for (int pos : positions) ids.push_back(dataset.train[static_cast<size_t>(pos)].id);
  return ids;
}

IterationStep make_step(const Dataset& dataset, const IclCallResult& call,
                        std::string reasoning_path_in) {
  IterationStep step;
  step.reasoning_path_in = std::move(reasoning_path_in);
  step.demo_indices = to_ids(dataset, call.demo_positions);
  step.prompt = call.prompt;
  step.raw_response = call.raw;
  ParsedResponse parsed = parse_response(call.raw, dataset.task);
  step.answer = parsed.answer;
  step.reasoning_path_out = parsed.reason;
  return step;
}

}  // namespace

IterationTrace run_ids(const Example& query, const Dataset& dataset,
                       std::span<const EmbeddingVector> train_vecs, Providers& providers,
                       const RunConfig& cfg) {
  if (train_vecs.size() != dataset.train.size())
    throw Error("run_ids: training embeddings not materialized");
  IterationTrace trace;
  trace.query_id = query.id;

  PromptBundle zero =
      render_prompt(dataset.task, {}, query, PromptMode::zero_shot_cot, cfg.trigger);
  ChatRequest req;
  req.turns = to_turns(zero, cfg.system_turn);
  req.params = cfg.generation;
  req.tag = std::to_string(query.id);
  std::string raw0 = complete(providers.chat, req, providers.completion);
  ++trace.chat_calls;
  std::string reasoning_path = parse_response(raw0, dataset.task).reason;
  trace.zero_shot = ZeroShotStep{zero.text(), raw0, reasoning_path};

  for (int j = 0; j < cfg.q; ++j) {
    EmbeddingVector path_vec = embed(providers.embed, providers.cache, {reasoning_path})[0];
    ++trace.path_embeddings;
    DemonstrationSet demos = knn_top_k(path_vec, train_vecs, cfg.k);
    IclCallResult call = icl_call(query, dataset, demos.indices, providers, cfg);
    ++trace.chat_calls;
    IterationStep step = make_step(dataset, call, reasoning_path);
    reasoning_path = step.reasoning_path_out;
    trace.answer_set.push_back(step.answer);
    trace.steps.push_back(std::move(step));
  }
  trace.final_answer = majority_vote(trace.answer_set);
  return trace;
}

IterationTrace run_baseline(const Example& query, const Dataset& dataset,
                            std::span<const EmbeddingVector> train_vecs, Providers& providers,
                            const RunConfig& cfg, std::span<const DemonstrationSet> cluster_reps) {
  if (cfg.strategy == Strategy::ids) throw Error("run_baseline: strategy is ids");
  if (train_vecs.size() != dataset.train.size())
    throw Error("run_baseline: training embeddings not materialized");
  IterationTrace trace;
  trace.query_id = query.id;

  // Query-keyed strategies select once; voting strategies reselect per run.
  std::vector<int> fixed_positions;
  if (cfg.strategy == Strategy::topk_consistency || cfg.strategy == Strategy::mmr_consistency) {
    EmbeddingVector query_vec =
        embed(providers.embed, providers.cache, {query.input_text})[0];
    DemonstrationSet demos =
        cfg.strategy == Strategy::topk_consistency
            ? knn_top_k(query_vec, train_vecs, cfg.k)
            : mmr_k(query_vec, train_vecs, cfg.k, cfg.mmr_lambda);
    fixed_positions = demos.indices;
  }

  for (int j = 0; j < cfg.q; ++j) {
    std::vector<int> positions;
    switch (cfg.strategy) {
      case Strategy::topk_consistency:
      case Strategy::mmr_consistency:
        positions = fixed_positions;
        break;
      case Strategy::random_voting:
        positions = random_k(static_cast<int>(dataset.train.size()), cfg.k,
                             derive_seed(cfg.seed, static_cast<uint64_t>(query.id),
                                         static_cast<uint64_t>(j) + 1))
                        .indices;
        break;
      case Strategy::cluster_voting:
        if (static_cast<size_t>(j) >= cluster_reps.size())
          throw Error("run_baseline: missing cluster representatives for iteration " +
                      std::to_string(j + 1));
        positions = cluster_reps[static_cast<size_t>(j)].indices;
        break;
      case Strategy::ids:
        break;
    }
    IclCallResult call = icl_call(query, dataset, positions, providers, cfg);
    ++trace.chat_calls;
    IterationStep step = make_step(dataset, call, "");
    trace.answer_set.push_back(step.answer);
    trace.steps.push_back(std::move(step));
  }
  trace.final_answer = majority_vote(trace.answer_set);
  return trace;
}

EvalResult evaluate(const std::vector<IterationTrace>& traces, const std::vector<Example>& test,
                    const TaskKind& task) {
  if (traces.size() != test.size())
    throw Error("evaluate: " + std::to_string(traces.size()) + " traces for " +
                std::to_string(test.size()) + " test examples");
  std::unordered_map<int, const Example*> by_id;
  for (const auto& ex : test) by_id.emplace(ex.id, &ex);
  EvalResult result;
  for (const auto& trace : traces) {
    auto it = by_id.find(trace.query_id);
    if (it == by_id.end())
      throw Error("evaluate: trace for unknown query id " + std::to_string(trace.query_id));
    if (!trace.final_answer) {
      ++result.abstained;
      ++result.wrong;
      continue;
    }
    std::string gold = normalize_answer(it->second->label_text, task);
    if (*trace.final_answer == gold) {
      ++result.correct;
    } else {
      ++result.wrong;
    }
  }
  result.accuracy = traces.empty()
                        ? 0.0
                        : static_cast<double>(result.correct) / static_cast<double>(traces.size());
  return result;
}

namespace {

json metrics_json(const Dataset& dataset, const std::vector<IterationTrace>& all_traces,
                  const EvalResult& eval, Providers& providers, const RunConfig& cfg,
                  std::span<const EmbeddingVector> train_vecs) {
  json m;
  m["accuracy"] = {{"accuracy", eval.accuracy},
                   {"correct", eval.correct},
                   {"wrong", eval.wrong},
                   {"abstained", eval.abstained}};

  // Similarity/overlap diagnostics cover the queries that completed.
  std::vector<IterationTrace> traces;
  for (const auto& t : all_traces) {
    if (!t.aborted) traces.push_back(t);
  }

  // Query embeddings are a post-hoc diagnostic, computed through the cache.
  std::vector<std::string> query_texts;
  std::unordered_map<int, const Example*> test_by_id;
  for (const auto& ex : dataset.test) test_by_id.emplace(ex.id, &ex);
  std::vector<EmbeddingVector> query_vecs;
  query_vecs.reserve(traces.size());
  for (const auto& t : traces) {
    auto it = test_by_id.find(t.query_id);
    if (it == test_by_id.end()) throw Error("metrics: trace for unknown query id");
    query_texts.push_back(it->second->input_text);
  }
  if (!query_texts.empty())
    query_vecs = embed(providers.embed, providers.cache, query_texts);

  std::unordered_map<int, size_t> train_pos_by_id;
  for (size_t i = 0; i < dataset.train.size(); ++i)
    train_pos_by_id.emplace(dataset.train[i].id, i);
  auto train_vec_by_id = [&](int id) -> const EmbeddingVector& {
    auto it = train_pos_by_id.find(id);
    if (it == train_pos_by_id.end())
      throw Error("metrics: demo index " + std::to_string(id) + " not in training split");
    return train_vecs[it->second];
  };

  SimilarityReport sim = similarity_report(traces, query_vecs, train_vec_by_id);
  m["similarity"] = {{"avg_query_demo_similarity", sim.avg_query_demo_similarity},
                     {"avg_pairwise_similarity", sim.avg_pairwise_similarity}};

  auto gold_by_query = [&](int id) -> std::optional<std::string> {
    auto it = test_by_id.find(id);
    if (it == test_by_id.end()) return std::nullopt;
    return normalize_answer(it->second->label_text, dataset.task);
  };
  json overlap = json::array();
  for (int j = 2; j <= cfg.q; ++j) {
    OverlapReport rep = overlap_proportions(traces, j, gold_by_query);
    overlap.push_back({{"at_iteration", rep.at_iteration},
                       {"prop_pre", rep.prop_pre},
                       {"prop_pre_wrong", rep.prop_pre_wrong}});
  }
  m["overlap"] = overlap;

  int chat_total = 0, path_total = 0, zero_shot_calls = 0;
  for (const auto& t : all_traces) {
    chat_total += t.chat_calls;
    path_total += t.path_embeddings;
    if (t.zero_shot) ++zero_shot_calls;
  }
  m["calls"] = {{"chat_calls_total", chat_total},
                {"icl_calls_total", chat_total - zero_shot_calls},
                {"zero_shot_calls", zero_shot_calls},
                {"path_embeddings_total", path_total}};
  return m;
}

std::unordered_set<int> completed_query_ids(const std::filesystem::path& traces_path) {
  std::unordered_set<int> done;
  if (!std::filesystem::exists(traces_path)) return done;
  for (const auto& line : read_lines(traces_path)) {
    if (trim(line).empty()) continue;
    IterationTrace t = trace_from_json(json::parse(line));
    if (!t.aborted) done.insert(t.query_id);
  }
  return done;
}

}  // namespace

RunOutcome run_experiment(const Dataset& dataset, Providers& providers, const RunConfig& cfg,
                          const std::filesystem::path& run_dir, bool resume,
                          const nlohmann::json* extra_config) {
  namespace fs = std::filesystem;
  if (cfg.q < 1 || cfg.k < 1) throw Error("run_experiment: q and k must be >= 1");
  fs::create_directories(run_dir);
  const fs::path traces_path = run_dir / "traces.jsonl";

  json config = cfg.to_json();
  config["dataset"] = {{"name", dataset.name},
                       {"task", dataset.task.name},
                       {"train_size", dataset.train.size()},
                       {"test_size", dataset.test.size()}};
  config["providers"] = {{"chat", providers.chat.provider_id()},
                         {"embed", providers.embed.provider_id()},
                         {"embed_model", providers.embed.model_id()}};
  if (extra_config) config.update(*extra_config);
  write_file(run_dir / "config.json", config.dump(2) + "\n");

  std::vector<EmbeddingVector> train_vecs = embed_training_set(dataset, providers, cfg);

  // Cluster-voting reselects per run; each run reseeds the partition.
  std::vector<DemonstrationSet> cluster_reps;
  if (cfg.strategy == Strategy::cluster_voting) {
    for (int j = 0; j < cfg.q; ++j) {
      KMeansConfig kc = cfg.kmeans;
      kc.seed = derive_seed(cfg.seed, 0xC1u, static_cast<uint64_t>(j) + 1);
      KMeansResult clusters = kmeans_partition(train_vecs, cfg.k, kc);
      cluster_reps.push_back(cluster_representatives(clusters, train_vecs));
    }
  }

  std::unordered_set<int> done =
      resume ? completed_query_ids(traces_path) : std::unordered_set<int>{};
  std::vector<IterationTrace> previous;
  if (resume && fs::exists(traces_path)) {
    for (const auto& line : read_lines(traces_path)) {
      if (trim(line).empty()) continue;
      IterationTrace t = trace_from_json(json::parse(line));
      if (!t.aborted && done.count(t.query_id)) previous.push_back(std::move(t));
    }
  }

  std::vector<const Example*> pending;
  for (const auto& ex : dataset.test) {
    if (!done.count(ex.id)) pending.push_back(&ex);
  }

  std::ofstream sink(traces_path, resume ? std::ios::app : std::ios::trunc);
  if (!sink) throw Error("cannot open trace sink: " + traces_path.string());

  std::vector<IterationTrace> fresh(pending.size());
  const long n_pending = static_cast<long>(pending.size());
  const int workers = std::max(1, cfg.parallel);
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (long i = 0; i < n_pending; ++i) {
    const Example& query = *pending[static_cast<size_t>(i)];
    IterationTrace trace;
    try {
      trace = cfg.strategy == Strategy::ids
                  ? run_ids(query, dataset, train_vecs, providers, cfg)
                  : run_baseline(query, dataset, train_vecs, providers, cfg, cluster_reps);
    } catch (const std::exception& e) {
      trace = IterationTrace{};
      trace.query_id = query.id;
      trace.aborted = true;
      trace.error = e.what();
    }
#pragma omp critical(ids_trace_sink)
    {
      sink << trace_to_json(trace).dump() << "\n";
      sink.flush();
    }
    fresh[static_cast<size_t>(i)] = std::move(trace);
  }
  sink.close();

  RunOutcome outcome;
  outcome.traces = std::move(previous);
  for (auto& t : fresh) outcome.traces.push_back(std::move(t));
  std::sort(outcome.traces.begin(), outcome.traces.end(),
            [](const IterationTrace& a, const IterationTrace& b) { return a.query_id < b.query_id; });
  for (const auto& t : outcome.traces) outcome.any_aborted = outcome.any_aborted || t.aborted;

  // Canonical trace file: sorted by query id, one line per query.
  {
    std::ofstream canon(traces_path, std::ios::trunc);
    for (const auto& t : outcome.traces) canon << trace_to_json(t).dump() << "\n";
  }

  outcome.eval = evaluate(outcome.traces, dataset.test, dataset.task);
  outcome.metrics = metrics_json(dataset, outcome.traces, outcome.eval, providers, cfg, train_vecs);
  write_file(run_dir / "metrics.json", outcome.metrics.dump(2) + "\n");
  return outcome;
}

}  // namespace ids
