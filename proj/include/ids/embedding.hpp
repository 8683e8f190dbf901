// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ids/util.hpp"

namespace ids {

struct EmbeddingVector {
  std::vector<double> values;
  double norm = 0.0;  // cached Euclidean norm

  static EmbeddingVector of(std::vector<double> v);
  size_t dim() const { return values.size(); }
};

// dot(a,b) / (|a||b|). Throws on dimension mismatch or zero norms.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // One vector per text, order-preserving. All vectors share one dimension.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) = 0;
  virtual std::string provider_id() const = 0;
  virtual std::string model_id() const = 0;

  uint64_t batch_calls() const { return batch_calls_.load(); }
  uint64_t texts_embedded() const { return texts_embedded_.load(); }
  void reset_counters() { batch_calls_ = 0; texts_embedded_ = 0; }

 protected:
  void count(size_t texts) {
    ++batch_calls_;
    texts_embedded_ += texts;
  }

 private:
  std::atomic<uint64_t> batch_calls_{0};
  std::atomic<uint64_t> texts_embedded_{0};
};

inline constexpr size_t kOfflineEmbeddingDim = 256;

// Deterministic bag of hashed token unigrams+bigrams, L2-normalized,
// D=256. A pure function of the input text; token overlap raises cosine.
// Empty (or fully cancelled) texts map to a reserved unit vector instead
// of erroring so malformed model output cannot abort a run.
class OfflineEmbeddingProvider : public EmbeddingProvider {
 public:
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::string provider_id() const override { return "offline"; }
  std::string model_id() const override { return "hashed-ngram-256"; }

  static EmbeddingVector embed_one(const std::string& text);
};

EmbeddingVector offline_embed(const std::string& text);

// Remote provider speaking {model, input:[...]} -> {data:[{embedding:[...]}]},
// order-aligned with the input.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string model, std::string api_key,
                        int timeout_sec = 60);
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) override;
  std::string provider_id() const override { return "http"; }
  std::string model_id() const override { return model_; }

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_;
  int timeout_sec_;
};

// Content-addressed cache. Entries are keyed by provider/model/text hash and
// persisted as an append-only JSONL file so runs replay without refetching.
// Lookups and insertions are safe from concurrent workers.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path persist_path);

  static std::string make_key(const EmbeddingProvider& provider, const std::string& text);

  std::optional<EmbeddingVector> lookup(const std::string& key) const;
  void insert(const std::string& key, const EmbeddingVector& vec);
  size_t size() const;
  std::optional<size_t> dimension() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  std::optional<size_t> dim_;
  std::ofstream append_;
  void insert_locked(const std::string& key, const EmbeddingVector& vec, bool persist);
};

// Cache-aware batch embedding: cached entries are never refetched; misses go
// to the provider in one batch and are inserted before returning.
std::vector<EmbeddingVector> embed(EmbeddingProvider& provider, EmbeddingCache& cache,
                                   const std::vector<std::string>& texts);

}  // namespace ids
