// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/embedding.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <omp.h>

#include <cctype>
#include <cmath>

namespace ids {

using nlohmann::json;

EmbeddingVector EmbeddingVector::of(std::vector<double> v) {
  EmbeddingVector e;
  e.values = std::move(v);
  double s = 0.0;
  for (double x : e.values) s += x * x;
  e.norm = std::sqrt(s);
  return e;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim())
    throw Error("cosine: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                std::to_string(b.dim()) + ")");
  if (a.norm == 0.0 || b.norm == 0.0) throw Error("cosine: zero-norm vector");
  double dot = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return dot / (a.norm * b.norm);
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

EmbeddingVector reserved_unit_vector() {
  std::vector<double> v(kOfflineEmbeddingDim, 0.0);
  v[0] = 1.0;
  return EmbeddingVector::of(std::move(v));
}

void accumulate(std::vector<double>& acc, std::string_view feature) {
  uint64_t h = fnv1a64(feature);
  size_t idx = static_cast<size_t>(h % kOfflineEmbeddingDim);
  double sign = (h >> 63) ? -1.0 : 1.0;  // signed hashing keeps unrelated texts near-orthogonal
  acc[idx] += sign;
}

}  // namespace

EmbeddingVector OfflineEmbeddingProvider::embed_one(const std::string& text) {
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) return reserved_unit_vector();
  std::vector<double> acc(kOfflineEmbeddingDim, 0.0);
  for (const auto& tok : tokens) accumulate(acc, tok);
  for (size_t i = 0; i + 1 < tokens.size(); ++i) accumulate(acc, tokens[i] + "_" + tokens[i + 1]);
  EmbeddingVector v = EmbeddingVector::of(std::move(acc));
  if (v.norm == 0.0) return reserved_unit_vector();  // total sign cancellation
  for (double& x : v.values) x /= v.norm;
  v.norm = 1.0;
  return v;
}

std::vector<EmbeddingVector> OfflineEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  count(texts.size());
  std::vector<EmbeddingVector> out(texts.size());
  const long n = static_cast<long>(texts.size());
#pragma omp parallel for schedule(static) if (n > 64 && !omp_in_parallel())
  for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = embed_one(texts[static_cast<size_t>(i)]);
  return out;
}

EmbeddingVector offline_embed(const std::string& text) {
  return OfflineEmbeddingProvider::embed_one(text);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string model,
                                             std::string api_key, int timeout_sec)
    : base_url_(std::move(base_url)), model_(std::move(model)), api_key_(std::move(api_key)),
      timeout_sec_(timeout_sec) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  count(texts.size());
  httplib::Client client(base_url_);
  client.set_read_timeout(timeout_sec_, 0);
  client.set_connection_timeout(timeout_sec_, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  json body;
  body["model"] = model_;
  body["input"] = texts;
  auto res = client.Post("/embeddings", headers, body.dump(), "application/json");
  if (!res) throw Error("embeddings endpoint unreachable: " + base_url_);
  if (res->status != 200)
    throw Error("embeddings endpoint returned HTTP " + std::to_string(res->status) + ": " +
                res->body);
  json reply = json::parse(res->body);
  if (!reply.contains("data") || !reply["data"].is_array() || reply["data"].size() != texts.size())
    throw Error("embeddings response malformed: expected `data` array aligned with input");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& item : reply["data"]) {
    std::vector<double> values = item.at("embedding").get<std::vector<double>>();
    out.push_back(EmbeddingVector::of(std::move(values)));
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path persist_path) {
  namespace fs = std::filesystem;
  if (fs::exists(persist_path)) {
    for (const auto& line : read_lines(persist_path)) {
      if (trim(line).empty()) continue;
      json j = json::parse(line);
      EmbeddingVector v = EmbeddingVector::of(j.at("values").get<std::vector<double>>());
      insert_locked(j.at("key").get<std::string>(), v, /*persist=*/false);
    }
  } else if (persist_path.has_parent_path()) {
    fs::create_directories(persist_path.parent_path());
  }
  append_.open(persist_path, std::ios::app);
  if (!append_) throw Error("cannot open embedding cache file: " + persist_path.string());
}

std::string EmbeddingCache::make_key(const EmbeddingProvider& provider, const std::string& text) {
  return provider.provider_id() + ":" + provider.model_id() + ":" + sha256_hex(text);
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::insert_locked(const std::string& key, const EmbeddingVector& vec,
                                   bool persist) {
  if (dim_ && *dim_ != vec.dim())
    throw Error("embedding dimension mismatch against cache: got " + std::to_string(vec.dim()) +
                ", cache holds " + std::to_string(*dim_) + " (model change?)");
  dim_ = vec.dim();
  auto [it, inserted] = entries_.emplace(key, vec);
  (void)it;
  if (inserted && persist && append_.is_open()) {
    json j;
    j["key"] = key;
    j["values"] = vec.values;
    append_ << j.dump() << "\n";
    append_.flush();
  }
}

void EmbeddingCache::insert(const std::string& key, const EmbeddingVector& vec) {
  std::lock_guard<std::mutex> lock(mu_);
  insert_locked(key, vec, /*persist=*/true);
}

size_t EmbeddingCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::optional<size_t> EmbeddingCache::dimension() const {
  std::lock_guard<std::mutex> lock(mu_);
  return dim_;
}

std::vector<EmbeddingVector> embed(EmbeddingProvider& provider, EmbeddingCache& cache,
                                   const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error("embed: empty text list");
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::string> keys(texts.size());
  std::unordered_map<std::string, size_t> fetch_index;  // key -> slot in miss batch
  std::vector<size_t> miss_pos;
  std::vector<std::string> miss_texts;
  for (size_t i = 0; i < texts.size(); ++i) {
    keys[i] = EmbeddingCache::make_key(provider, texts[i]);
    if (auto hit = cache.lookup(keys[i])) {
      out[i] = std::move(*hit);
      continue;
    }
    miss_pos.push_back(i);
    if (fetch_index.emplace(keys[i], miss_texts.size()).second)
      miss_texts.push_back(texts[i]);  // dedupe repeated texts within the batch
  }
  if (!miss_texts.empty()) {
    std::vector<EmbeddingVector> fetched = provider.embed_batch(miss_texts);
    if (fetched.size() != miss_texts.size())
      throw Error("embedding provider returned " + std::to_string(fetched.size()) +
                  " vectors for " + std::to_string(miss_texts.size()) + " texts");
    for (size_t pos : miss_pos) {
      const EmbeddingVector& v = fetched[fetch_index.at(keys[pos])];
      cache.insert(keys[pos], v);
      out[pos] = v;
    }
  }
  return out;
}

}  // namespace ids
