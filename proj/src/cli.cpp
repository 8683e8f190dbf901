// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <random>

#include "ids/pipeline.hpp"
#include "ids/report.hpp"

namespace ids::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CliConfig {
  std::string train_path;
  std::string test_path;
  std::string task = "commonsense_reasoning";
  std::string strategy = "ids";
  int k = 4;
  int q = 3;
  uint64_t seed = 0;
  double temperature = 0.7;
  int max_tokens = 1024;
  double top_p = 1.0;
  std::string model = "gpt-3.5-turbo";
  std::string trigger = "default";
  std::string provider = "scripted:session.jsonl";
  std::string embed_provider = "offline";
  std::string embed_model = "text-embedding-ada-002";
  int parallel = 4;
  std::string run_dir = "runs";
  std::string run_id;
  std::string resume;
  uint64_t n_train = 0;  // 0 = whole split
  uint64_t n_test = 0;
  double mmr_lambda = 0.5;
  bool embed_labels = false;
  bool system_turn = false;
  int rpm = 0;
  std::string session;  // record/replay session path

  json to_json() const {
    return json{{"train", train_path},   {"test", test_path},
                {"task", task},          {"strategy", strategy},
                {"k", k},                {"q", q},
                {"seed", seed},          {"temperature", temperature},
                {"max_tokens", max_tokens}, {"top_p", top_p},
                {"model", model},        {"trigger", trigger},
                {"provider", provider},  {"embed_provider", embed_provider},
                {"embed_model", embed_model}, {"parallel", parallel},
                {"n_train", n_train},    {"n_test", n_test},
                {"mmr_lambda", mmr_lambda}, {"embed_labels", embed_labels},
                {"system_turn", system_turn}, {"rpm", rpm}};
  }

  void apply_json(const json& j) {
    train_path = j.value("train", train_path);
    test_path = j.value("test", test_path);
    task = j.value("task", task);
    strategy = j.value("strategy", strategy);
    k = j.value("k", k);
    q = j.value("q", q);
    seed = j.value("seed", seed);
    temperature = j.value("temperature", temperature);
    max_tokens = j.value("max_tokens", max_tokens);
    top_p = j.value("top_p", top_p);
    model = j.value("model", model);
    trigger = j.value("trigger", trigger);
    provider = j.value("provider", provider);
    embed_provider = j.value("embed_provider", embed_provider);
    embed_model = j.value("embed_model", embed_model);
    parallel = j.value("parallel", parallel);
    n_train = j.value("n_train", n_train);
    n_test = j.value("n_test", n_test);
    mmr_lambda = j.value("mmr_lambda", mmr_lambda);
    embed_labels = j.value("embed_labels", embed_labels);
    system_turn = j.value("system_turn", system_turn);
    rpm = j.value("rpm", rpm);
  }
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string api_key_from_env() {
  if (const char* k = std::getenv("IDS_API_KEY")) return k;
  if (const char* k = std::getenv("OPENAI_API_KEY")) return k;
  return "";
}

std::unique_ptr<ChatProvider> make_chat_provider(const std::string& spec) {
  if (spec.rfind("scripted:", 0) == 0) {
    auto path = spec.substr(9);
    if (!fs::exists(path)) throw ConfigError("--provider: scripted session not found: " + path);
    return std::make_unique<ScriptedChatProvider>(ScriptedChatProvider::from_file(path));
  }
  if (spec.rfind("replay:", 0) == 0) {
    auto path = spec.substr(7);
    if (!fs::exists(path)) throw ConfigError("--provider: replay session not found: " + path);
    return std::make_unique<ReplayChatProvider>(path);
  }
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0)
    return std::make_unique<HttpChatProvider>(spec, api_key_from_env());
  throw ConfigError("--provider: expected scripted:PATH, replay:PATH or an http(s) base URL, got `" +
                    spec + "`");
}

std::unique_ptr<EmbeddingProvider> make_embed_provider(const std::string& spec,
                                                       const std::string& model) {
  if (spec == "offline") return std::make_unique<OfflineEmbeddingProvider>();
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0)
    return std::make_unique<HttpEmbeddingProvider>(spec, model, api_key_from_env());
  throw ConfigError("--embed-provider: expected `offline` or an http(s) base URL, got `" + spec +
                    "`");
}

RunConfig to_run_config(const CliConfig& c) {
  RunConfig cfg;
  auto strategy = parse_strategy(c.strategy);
  if (!strategy)
    throw ConfigError("--strategy: unknown strategy `" + c.strategy +
                      "` (ids, topk_consistency, random_voting, cluster_voting, mmr_consistency)");
  cfg.strategy = *strategy;
  if (c.k < 1) throw ConfigError("--k: must be >= 1");
  if (c.q < 1) throw ConfigError("--q: must be >= 1");
  if (c.temperature < 0) throw ConfigError("--temperature: must be >= 0");
  if (c.mmr_lambda < 0 || c.mmr_lambda > 1) throw ConfigError("--mmr-lambda: must lie in [0, 1]");
  if (c.parallel < 1) throw ConfigError("--parallel: must be >= 1");
  cfg.k = c.k;
  cfg.q = c.q;
  cfg.seed = c.seed;
  cfg.generation.temperature = c.temperature;
  cfg.generation.max_tokens = c.max_tokens;
  cfg.generation.top_p = c.top_p;
  cfg.generation.model_id = c.model;
  auto trig = triggers::resolve(c.trigger);
  if (!trig)
    throw ConfigError("--trigger: expected default, trigger1, trigger2 or custom:<text>, got `" +
                      c.trigger + "`");
  cfg.trigger = *trig;
  cfg.mmr_lambda = c.mmr_lambda;
  cfg.kmeans.seed = c.seed;
  cfg.embed_labels = c.embed_labels;
  cfg.system_turn = c.system_turn;
  cfg.parallel = c.parallel;
  return cfg;
}

Dataset load_cli_dataset(const CliConfig& c) {
  auto task = TaskKind::parse(c.task);
  if (!task) {
    std::string names;
    for (const auto& n : TaskKind::names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("--task: unknown task kind `" + c.task + "` (expected one of: " + names +
                      ")");
  }
  if (c.train_path.empty()) throw ConfigError("--train: dataset path required");
  if (c.test_path.empty()) throw ConfigError("--test: dataset path required");
  Dataset d = load_dataset(c.train_path, c.test_path, *task);
  if (c.n_train > 0 || c.n_test > 0) {
    size_t nt = c.n_train > 0 ? c.n_train : d.train.size();
    size_t ne = c.n_test > 0 ? c.n_test : d.test.size();
    d = subsample(d, nt, ne, c.seed);
  }
  return d;
}

std::string fresh_run_id() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t t = system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", std::gmtime(&t));
  std::random_device rd;
  char suffix[8];
  std::snprintf(suffix, sizeof(suffix), "%04x", rd() & 0xffff);
  return std::string("run-") + buf + "-" + suffix;
}

void print_outcome(const std::string& run_id, const RunOutcome& outcome) {
  const json& acc = outcome.metrics.at("accuracy");
  const json& sim = outcome.metrics.at("similarity");
  const json& calls = outcome.metrics.at("calls");
  std::cout << "run " << run_id << " completed\n";
  std::cout << "  accuracy: " << acc.at("accuracy").get<double>() << " ("
            << acc.at("correct").get<int>() << " correct, " << acc.at("wrong").get<int>()
            << " wrong, " << acc.at("abstained").get<int>() << " abstained)\n";
  std::cout << "  avg query-demo similarity: " << sim.at("avg_query_demo_similarity").get<double>()
            << "\n";
  std::cout << "  avg pairwise similarity:   " << sim.at("avg_pairwise_similarity").get<double>()
            << "\n";
  std::cout << "  chat calls: " << calls.at("chat_calls_total").get<int>() << " ("
            << calls.at("zero_shot_calls").get<int>() << " zero-shot + "
            << calls.at("icl_calls_total").get<int>() << " ICL), reasoning-path embeddings: "
            << calls.at("path_embeddings_total").get<int>() << "\n";
  if (outcome.any_aborted)
    std::cout << "  WARNING: some queries aborted; re-run with --resume to retry them\n";
}

// Shared body of run/record/replay. `session_mode`: 0 plain, 1 record, 2 replay.
int do_run(CliConfig& c, bool resume_requested, int session_mode) {
  std::string run_id = c.run_id.empty() ? fresh_run_id() : c.run_id;
  fs::path run_root = c.run_dir;
  bool resume = false;

  if (resume_requested) {
    run_id = c.resume;
    fs::path config_path = run_root / run_id / "config.json";
    if (!fs::exists(config_path))
      throw ConfigError("--resume: no run config at " + config_path.string());
    json persisted = json::parse(read_file(config_path));
    if (!persisted.contains("cli"))
      throw ConfigError("--resume: run was not started by this CLI (missing `cli` block)");
    c.apply_json(persisted["cli"]);
    resume = true;
  }

  Dataset dataset = load_cli_dataset(c);
  RunConfig cfg = to_run_config(c);

  std::unique_ptr<ChatProvider> base_chat;
  std::unique_ptr<ChatProvider> chat;
  if (session_mode == 2) {
    if (c.session.empty()) throw ConfigError("--session: session path required for replay");
    if (!fs::exists(c.session)) throw ConfigError("--session: not found: " + c.session);
    chat = std::make_unique<ReplayChatProvider>(c.session);
  } else {
    chat = make_chat_provider(c.provider);
    if (session_mode == 1) {
      if (c.session.empty()) throw ConfigError("--session: session path required for record");
      base_chat = std::move(chat);
      chat = std::make_unique<RecordingChatProvider>(*base_chat, c.session);
    }
  }
  std::unique_ptr<EmbeddingProvider> embed_provider =
      make_embed_provider(c.embed_provider, c.embed_model);

  fs::path run_dir = run_root / run_id;
  fs::create_directories(run_dir);
  EmbeddingCache cache(run_dir / "embedding_cache.jsonl");

  std::optional<TokenBucket> bucket;
  CompletionPolicy policy;
  if (c.rpm > 0) {
    bucket.emplace(static_cast<double>(c.rpm), std::max(1.0, c.rpm / 10.0));
    policy.rate_limiter = &*bucket;
  }
  Providers providers{*chat, *embed_provider, cache, policy};

  json extra;
  extra["cli"] = c.to_json();
  RunOutcome outcome = run_experiment(dataset, providers, cfg, run_dir, resume, &extra);
  write_file(run_dir / "meta.json",
             json{{"run_id", run_id},
                  {"completed_at", static_cast<long>(std::time(nullptr))}}
                     .dump(2) +
                 "\n");
  print_outcome(run_id, outcome);
  return outcome.any_aborted ? kExitProvider : kExitOk;
}

int do_report(const std::vector<std::string>& run_ids, const std::string& run_dir,
              int overlap_iteration, std::string csv_path) {
  if (run_ids.empty()) throw ConfigError("report: at least one run id required");
  std::vector<RunSummary> runs;
  for (const auto& id : run_ids) runs.push_back(load_run_summary(fs::path(run_dir) / id));
  std::cout << render_report_table(runs, overlap_iteration);
  if (csv_path.empty()) csv_path = (fs::path(run_dir) / "report.csv").string();
  write_file(csv_path, render_report_csv(runs, overlap_iteration));
  std::cout << "csv written to " << csv_path << "\n";
  return kExitOk;
}

void add_run_flags(CLI::App* cmd, CliConfig& c, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file mirroring the flags");
  cmd->add_option("--train", c.train_path, "training split (JSONL)");
  cmd->add_option("--test", c.test_path, "test split (JSONL)");
  cmd->add_option("--task", c.task, "task kind");
  cmd->add_option("--strategy", c.strategy, "selection strategy");
  cmd->add_option("--k", c.k, "number of demonstrations");
  cmd->add_option("--q", c.q, "iterations / decoding paths");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--temperature", c.temperature, "sampling temperature");
  cmd->add_option("--max-tokens", c.max_tokens, "completion token budget");
  cmd->add_option("--top-p", c.top_p, "nucleus sampling mass");
  cmd->add_option("--model", c.model, "chat model id");
  cmd->add_option("--trigger", c.trigger,
                  "CoT trigger: default, trigger1, trigger2 or custom:<text>");
  cmd->add_option("--provider", c.provider, "chat provider: scripted:PATH, replay:PATH or URL");
  cmd->add_option("--embed-provider", c.embed_provider, "embedding provider: offline or URL");
  cmd->add_option("--embed-model", c.embed_model, "embedding model id (http provider)");
  cmd->add_option("--parallel", c.parallel, "query worker count");
  cmd->add_option("--run-dir", c.run_dir, "directory holding run records");
  cmd->add_option("--run-id", c.run_id, "explicit run id (default: timestamped)");
  cmd->add_option("--n-train", c.n_train, "subsample size for the training split (0 = all)");
  cmd->add_option("--n-test", c.n_test, "subsample size for the test split (0 = all)");
  cmd->add_option("--mmr-lambda", c.mmr_lambda, "MMR relevance/diversity trade-off");
  cmd->add_flag("--embed-labels", c.embed_labels, "include gold labels in demo embedding text");
  cmd->add_flag("--system-turn", c.system_turn, "move the instruction into a system message");
  cmd->add_option("--rpm", c.rpm, "requests-per-minute budget (0 = unlimited)");
}

}  // namespace

int run_main(int argc, const char* const* argv) {
  CLI::App app{"Iterative demonstration selection for in-context learning"};
  app.require_subcommand(1);

  CliConfig c;
  std::string config_path;

  auto* run_cmd = app.add_subcommand("run", "run an experiment");
  add_run_flags(run_cmd, c, config_path);
  run_cmd->add_option("--resume", c.resume, "resume a partial run by id");

  auto* record_cmd = app.add_subcommand("record", "run while recording provider responses");
  add_run_flags(record_cmd, c, config_path);
  record_cmd->add_option("--session", c.session, "session file to write")->required();

  auto* replay_cmd = app.add_subcommand("replay", "run against a recorded session");
  add_run_flags(replay_cmd, c, config_path);
  replay_cmd->add_option("--session", c.session, "session file to read")->required();

  std::vector<std::string> report_runs;
  std::string report_dir = "runs";
  int overlap_iteration = 0;
  std::string csv_path;
  auto* report_cmd = app.add_subcommand("report", "summarize one or more runs");
  report_cmd->add_option("runs", report_runs, "run ids");
  report_cmd->add_option("--run-dir", report_dir, "directory holding run records");
  report_cmd->add_option("--overlap-iteration", overlap_iteration,
                         "iteration for the overlap columns (default: last recorded)");
  report_cmd->add_option("--csv", csv_path, "CSV output path");

  // A config file supplies defaults; explicit flags win. The file is read
  // before the real parse so CLI11 simply overwrites.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        c.apply_json(nlohmann::json::parse(read_file(argv[i + 1])));
      } catch (const std::exception& e) {
        std::cerr << "error: --config: " << e.what() << "\n";
        return kExitConfig;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return do_run(c, !c.resume.empty(), 0);
    if (record_cmd->parsed()) return do_run(c, false, 1);
    if (replay_cmd->parsed()) return do_run(c, false, 2);
    if (report_cmd->parsed()) {
      if (overlap_iteration == 0) overlap_iteration = c.q > 1 ? c.q : 2;
      return do_report(report_runs, report_dir, overlap_iteration, csv_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ProviderError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return kExitProvider;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace ids::cli
