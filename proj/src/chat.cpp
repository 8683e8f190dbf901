// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/chat.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <regex>
#include <thread>

namespace ids {

using nlohmann::json;

const char* role_name(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

namespace {

json request_to_json(const ChatRequest& req) {
  json messages = json::array();
  for (const auto& t : req.turns) {
    messages.push_back({{"role", role_name(t.role)}, {"content", t.content}});
  }
  return json{{"model", req.params.model_id},
              {"messages", messages},
              {"temperature", req.params.temperature},
              {"max_tokens", req.params.max_tokens},
              {"top_p", req.params.top_p}};
}

double steady_now_sec() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

const std::string& last_user_content(const ChatRequest& req) {
  static const std::string empty;
  for (auto it = req.turns.rbegin(); it != req.turns.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  return empty;
}

}  // namespace

std::string chat_request_hash(const ChatRequest& req) {
  return sha256_hex(request_to_json(req).dump());
}

TokenBucket::TokenBucket(double per_minute, double burst, std::function<double()> clock_sec)
    : rate_per_sec_(per_minute / 60.0), burst_(burst), tokens_(burst),
      clock_(clock_sec ? std::move(clock_sec) : steady_now_sec) {
  last_ = clock_();
}

double TokenBucket::try_acquire() {
  std::lock_guard<std::mutex> lock(mu_);
  double now = clock_();
  tokens_ = std::min(burst_, tokens_ + (now - last_) * rate_per_sec_);
  last_ = now;
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return 0.0;
  }
  return (1.0 - tokens_) / rate_per_sec_;
}

void TokenBucket::acquire(const std::function<void(double)>& sleeper) {
  for (;;) {
    double wait = try_acquire();
    if (wait <= 0.0) return;
    if (sleeper) {
      sleeper(wait);
    } else {
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
  }
}

std::string complete(ChatProvider& provider, const ChatRequest& req,
                     const CompletionPolicy& policy) {
  if (req.turns.empty()) throw Error("complete: no chat turns");
  auto sleep_ms = [&](int ms) {
    if (policy.sleeper) {
      policy.sleeper(ms);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    }
  };
  int attempts = std::max(1, policy.max_attempts);
  double delay = policy.backoff_base_ms;
  for (int attempt = 1;; ++attempt) {
    if (policy.rate_limiter)
      policy.rate_limiter->acquire([&](double sec) { sleep_ms(static_cast<int>(sec * 1000) + 1); });
    try {
      return provider.complete(req);
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= attempts) throw;
      sleep_ms(static_cast<int>(delay));
      delay *= policy.backoff_factor;
    }
  }
}

std::string complete(ChatProvider& provider, const std::vector<ChatTurn>& turns,
                     const GenerationParams& params, const CompletionPolicy& policy) {
  ChatRequest req;
  req.turns = turns;
  req.params = params;
  return complete(provider, req, policy);
}

ScriptedChatProvider ScriptedChatProvider::from_file(const std::filesystem::path& path) {
  ScriptedChatProvider p;
  int line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("script " + path.string() + " line " + std::to_string(line_no) + ": " +
                  e.what());
    }
    Entry entry;
    if (j.contains("key")) {
      entry.key = j["key"].is_string() ? j["key"].get<std::string>() : j["key"].dump();
    }
    if (j.contains("pattern")) entry.pattern = j["pattern"].get<std::string>();
    if (j.contains("fail")) entry.fail = j["fail"].get<std::string>();
    if (j.contains("response")) entry.response = j["response"].get<std::string>();
    if (!entry.fail && entry.response.empty())
      throw Error("script " + path.string() + " line " + std::to_string(line_no) +
                  ": entry needs `response` or `fail`");
    p.add_entry(std::move(entry));
  }
  return p;
}

void ScriptedChatProvider::add_response(std::string response) {
  add_entry(Entry{std::nullopt, std::nullopt, std::move(response), std::nullopt});
}

void ScriptedChatProvider::add_keyed(std::string key, std::string response) {
  add_entry(Entry{std::move(key), std::nullopt, std::move(response), std::nullopt});
}

void ScriptedChatProvider::add_pattern(std::string pattern, std::string response) {
  add_entry(Entry{std::nullopt, std::move(pattern), std::move(response), std::nullopt});
}

void ScriptedChatProvider::add_entry(Entry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.push_back(std::move(entry));
  consumed_.push_back(false);
}

size_t ScriptedChatProvider::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  size_t n = 0;
  for (bool c : consumed_) n += c ? 0 : 1;
  return n;
}

std::string ScriptedChatProvider::complete(const ChatRequest& req) {
  count();
  std::lock_guard<std::mutex> lock(mu_);
  const std::string& prompt = last_user_content(req);
  if (max_prompt_chars_ > 0 && prompt.size() > max_prompt_chars_)
    throw ContextLengthError("scripted context limit exceeded: prompt of " +
                             std::to_string(prompt.size()) + " chars > " +
                             std::to_string(max_prompt_chars_));

  auto take = [&](size_t i) -> std::string {
    consumed_[i] = true;
    const Entry& e = entries_[i];
    if (e.fail) {
      if (*e.fail == "transient") throw ProviderError("scripted transient failure", true);
      if (*e.fail == "auth") throw AuthError("scripted authentication failure");
      if (*e.fail == "context_length") throw ContextLengthError("scripted context overflow");
      throw Error("scripted failure kind unknown: " + *e.fail);
    }
    return e.response;
  };

  if (!req.tag.empty()) {
    for (size_t i = 0; i < entries_.size(); ++i) {
      if (!consumed_[i] && entries_[i].key && *entries_[i].key == req.tag) return take(i);
    }
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (consumed_[i] || !entries_[i].pattern) continue;
    if (std::regex_search(prompt, std::regex(*entries_[i].pattern))) return take(i);
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (!consumed_[i] && !entries_[i].key && !entries_[i].pattern) return take(i);
  }
  throw ScriptExhaustedError("script exhausted (tag=" + (req.tag.empty() ? "-" : req.tag) + ")");
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string api_key, int timeout_sec)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_sec_(timeout_sec) {}

std::string HttpChatProvider::complete(const ChatRequest& req) {
  count();
  httplib::Client client(base_url_);
  client.set_read_timeout(timeout_sec_, 0);
  client.set_connection_timeout(timeout_sec_, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post("/chat/completions", headers, request_to_json(req).dump(),
                         "application/json");
  if (!res) throw ProviderError("chat endpoint unreachable: " + base_url_, true);
  if (res->status == 401 || res->status == 403)
    throw AuthError("chat endpoint rejected credentials (HTTP " + std::to_string(res->status) +
                    ")");
  if (res->status == 400 && res->body.find("context_length") != std::string::npos)
    throw ContextLengthError("chat endpoint rejected oversized context: " + res->body);
  if (res->status == 408 || res->status == 429 || res->status >= 500)
    throw ProviderError("chat endpoint transient failure (HTTP " + std::to_string(res->status) +
                        "): " + res->body, true);
  if (res->status != 200)
    throw ProviderError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " +
                        res->body, false);
  json reply = json::parse(res->body);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw ProviderError("chat response malformed: " + res->body, false);
  }
}

RecordingChatProvider::RecordingChatProvider(ChatProvider& inner,
                                             const std::filesystem::path& session_path)
    : inner_(inner) {
  if (session_path.has_parent_path())
    std::filesystem::create_directories(session_path.parent_path());
  out_.open(session_path, std::ios::app);
  if (!out_) throw Error("cannot open session file: " + session_path.string());
}

std::string RecordingChatProvider::complete(const ChatRequest& req) {
  count();
  std::string response = inner_.complete(req);
  json record{{"request_hash", chat_request_hash(req)},
              {"request", request_to_json(req)},
              {"response_text", response}};
  std::lock_guard<std::mutex> lock(mu_);
  out_ << record.dump() << "\n";
  out_.flush();
  return response;
}

ReplayChatProvider::ReplayChatProvider(const std::filesystem::path& session_path) {
  for (const auto& line : read_lines(session_path)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    by_hash_[j.at("request_hash").get<std::string>()].push_back(
        j.at("response_text").get<std::string>());
  }
}

std::string ReplayChatProvider::complete(const ChatRequest& req) {
  count();
  std::string hash = chat_request_hash(req);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_hash_.find(hash);
  if (it == by_hash_.end() || it->second.empty())
    throw ReplayMissError("replay miss: no recorded response for request hash " + hash, hash);
  std::string response = std::move(it->second.front());
  it->second.pop_front();
  return response;
}

}  // namespace ids
