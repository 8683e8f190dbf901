// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ids/util.hpp"

namespace ids {

enum class Role { system, user, assistant };
const char* role_name(Role role);

struct ChatTurn {
  Role role;
  std::string content;
};

struct GenerationParams {
  double temperature = 0.7;
  int max_tokens = 1024;
  double top_p = 1.0;
  std::string model_id = "gpt-3.5-turbo";
};

struct ChatRequest {
  std::vector<ChatTurn> turns;
  GenerationParams params;
  // Caller stream id (the pipeline uses the query id). Scripted providers
  // key per-query FIFO replies on it; network providers ignore it.
  std::string tag;
};

class ProviderError : public Error {
 public:
  ProviderError(const std::string& msg, bool retryable) : Error(msg), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class AuthError : public ProviderError {
 public:
  explicit AuthError(const std::string& msg) : ProviderError(msg, false) {}
};

// Surfaced distinctly so the caller can shed demonstrations and re-render.
class ContextLengthError : public ProviderError {
 public:
  explicit ContextLengthError(const std::string& msg) : ProviderError(msg, false) {}
};

class ScriptExhaustedError : public ProviderError {
 public:
  explicit ScriptExhaustedError(const std::string& msg) : ProviderError(msg, false) {}
};

class ReplayMissError : public ProviderError {
 public:
  ReplayMissError(const std::string& msg, std::string request_hash)
      : ProviderError(msg, false), request_hash_(std::move(request_hash)) {}
  const std::string& request_hash() const { return request_hash_; }

 private:
  std::string request_hash_;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& req) = 0;
  virtual std::string provider_id() const = 0;

  uint64_t calls() const { return calls_.load(); }
  void reset_counters() { calls_ = 0; }

 protected:
  void count() { ++calls_; }

 private:
  std::atomic<uint64_t> calls_{0};
};

// Process-wide requests-per-minute budget. The clock is injectable so the
// refill arithmetic is testable without sleeping.
class TokenBucket {
 public:
  TokenBucket(double per_minute, double burst, std::function<double()> clock_sec = {});
  // Seconds to wait before a token is available; 0 means one was taken.
  double try_acquire();
  void acquire(const std::function<void(double)>& sleeper = {});

 private:
  double rate_per_sec_;
  double burst_;
  double tokens_;
  double last_;
  std::function<double()> clock_;
  std::mutex mu_;
};

struct CompletionPolicy {
  int max_attempts = 5;
  int backoff_base_ms = 250;
  double backoff_factor = 2.0;
  TokenBucket* rate_limiter = nullptr;
  std::function<void(int /*ms*/)> sleeper;  // injectable; defaults to real sleep
};

// Provider call with exponential backoff on retryable failures and an
// optional requests-per-minute budget.
std::string complete(ChatProvider& provider, const ChatRequest& req,
                     const CompletionPolicy& policy = {});
std::string complete(ChatProvider& provider, const std::vector<ChatTurn>& turns,
                     const GenerationParams& params, const CompletionPolicy& policy = {});

// Canonical request hash used by the record/replay session format.
std::string chat_request_hash(const ChatRequest& req);

// Deterministic test double. Replies are consumed from (in precedence order)
// the FIFO queue keyed by the request tag, the first matching regex entry,
// then the global FIFO. Entries may instead raise scripted failures.
class ScriptedChatProvider : public ChatProvider {
 public:
  struct Entry {
    std::optional<std::string> key;      // matches ChatRequest::tag
    std::optional<std::string> pattern;  // regex over the last user turn
    std::string response;
    std::optional<std::string> fail;  // "transient" | "auth" | "context_length"
  };

  ScriptedChatProvider() = default;
  static ScriptedChatProvider from_file(const std::filesystem::path& path);

  void add_response(std::string response);
  void add_keyed(std::string key, std::string response);
  void add_pattern(std::string pattern, std::string response);
  void add_entry(Entry entry);
  // Scripted context limit: prompts longer than this raise ContextLengthError.
  void set_max_prompt_chars(size_t n) { max_prompt_chars_ = n; }

  std::string complete(const ChatRequest& req) override;
  std::string provider_id() const override { return "scripted"; }
  size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  std::vector<bool> consumed_;
  size_t max_prompt_chars_ = 0;
};

// OpenAI-style chat completions client:
// POST {base_url}/chat/completions with {model, messages, temperature,
// max_tokens, top_p}; the reply text is choices[0].message.content.
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string api_key, int timeout_sec = 120);
  std::string complete(const ChatRequest& req) override;
  std::string provider_id() const override { return "http"; }

 private:
  std::string base_url_;
  std::string api_key_;
  int timeout_sec_;
};

// Proxies an inner provider and appends {request_hash, request,
// response_text} JSONL records to the session file.
class RecordingChatProvider : public ChatProvider {
 public:
  RecordingChatProvider(ChatProvider& inner, const std::filesystem::path& session_path);
  std::string complete(const ChatRequest& req) override;
  std::string provider_id() const override { return inner_.provider_id() + "+record"; }

 private:
  ChatProvider& inner_;
  std::ofstream out_;
  std::mutex mu_;
};

// Serves a recorded session keyed by request hash; repeated identical
// requests consume responses in recorded order. Misses raise
// ReplayMissError with the unmatched hash.
class ReplayChatProvider : public ChatProvider {
 public:
  explicit ReplayChatProvider(const std::filesystem::path& session_path);
  std::string complete(const ChatRequest& req) override;
  std::string provider_id() const override { return "replay"; }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::deque<std::string>> by_hash_;
};

}  // namespace ids
