// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/reference/reference_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ids::reference {

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> cosine_scores(const EmbeddingVector& query,
                                  std::span<const EmbeddingVector> corpus) {
  std::vector<double> out;
  out.reserve(corpus.size());
  for (const auto& v : corpus) out.push_back(cosine(query, v));
  return out;
}

std::vector<int> knn_full_sort(const EmbeddingVector& query,
                               std::span<const EmbeddingVector> corpus, int k) {
  std::vector<double> scores = cosine_scores(query, corpus);
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  order.resize(static_cast<size_t>(k));
  return order;
}

double pairwise_similarity_mean(std::span<const EmbeddingVector> vecs) {
  double sum = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < vecs.size(); ++i) {
    for (size_t j = i + 1; j < vecs.size(); ++j) {
      sum += cosine(vecs[i], vecs[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::vector<int> mmr_greedy(const EmbeddingVector& query,
                            std::span<const EmbeddingVector> corpus, int k, double lambda) {
  const size_t n = corpus.size();
  std::vector<double> relevance = cosine_scores(query, corpus);
  std::vector<bool> selected(n, false);
  std::vector<int> picks;
  while (picks.size() < static_cast<size_t>(k)) {
    int best = -1;
    double best_score = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      double score;
      if (picks.empty()) {
        score = relevance[i];
      } else {
        double max_sim = -2.0;
        for (int j : picks) max_sim = std::max(max_sim, cosine(corpus[i], corpus[static_cast<size_t>(j)]));
        score = lambda * relevance[i] - (1.0 - lambda) * max_sim;
      }
      if (best < 0 || score > best_score) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    selected[static_cast<size_t>(best)] = true;
    picks.push_back(best);
  }
  return picks;
}

std::vector<int> assign_to_nearest_centroid(std::span<const EmbeddingVector> points,
                                            std::span<const EmbeddingVector> centroids) {
  std::vector<int> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = 0.0;
    for (size_t c = 0; c < centroids.size(); ++c) {
      double d = 0.0;
      for (size_t t = 0; t < points[i].values.size(); ++t) {
        double diff = points[i].values[t] - centroids[c].values[t];
        d += diff * diff;
      }
      if (c == 0 || d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[i] = best;
  }
  return out;
}

double clustering_objective(std::span<const EmbeddingVector> points,
                            std::span<const EmbeddingVector> centroids,
                            std::span<const int> assignment) {
  double sum = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& c = centroids[static_cast<size_t>(assignment[i])];
    for (size_t t = 0; t < points[i].values.size(); ++t) {
      double diff = points[i].values[t] - c.values[t];
      sum += diff * diff;
    }
  }
  return sum;
}

}  // namespace ids::reference
