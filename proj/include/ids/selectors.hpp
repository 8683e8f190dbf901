// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ids/embedding.hpp"

namespace ids {

// Ordered demonstration choice for one query. `indices` are positions into
// the training split; `scores` carry the selector's ranking value when it
// has one (cosine for KNN, greedy objective for MMR) and are empty otherwise.
struct DemonstrationSet {
  std::vector<int> indices;
  std::vector<double> scores;
};

struct KMeansConfig {
  int max_iters = 100;
  double tol = 1e-6;
  uint64_t seed = 0;
};

struct SelectorConfig {
  int k = 4;
  double mmr_lambda = 0.5;
  KMeansConfig kmeans;
};

// The k highest-cosine training examples, sorted by descending cosine, ties
// by ascending index.
DemonstrationSet knn_top_k(const EmbeddingVector& query_vec,
                           std::span<const EmbeddingVector> train_vecs, int k);

// k distinct uniform indices, deterministic given seed.
DemonstrationSet random_k(int train_size, int k, uint64_t seed);

struct KMeansResult {
  std::vector<int> assignment;                // point -> cluster id
  std::vector<EmbeddingVector> centroids;     // one per cluster
  std::vector<std::vector<int>> clusters;     // member indices per cluster, ascending
  std::vector<double> objective_history;      // sum of squared distances, per iteration
};

// Lloyd's algorithm with seeded farthest-point initialization. Terminates
// when the assignment is unchanged, the largest centroid shift drops below
// tol, or max_iters is reached. Clusters are kept non-empty by re-seeding an
// empty cluster from the point farthest from its current centroid.
KMeansResult kmeans_partition(std::span<const EmbeddingVector> train_vecs, int k,
                              const KMeansConfig& cfg);

// One member per cluster: minimal Euclidean distance to its centroid, ties
// by ascending index; output ordered by cluster id.
DemonstrationSet cluster_representatives(const KMeansResult& clusters,
                                         std::span<const EmbeddingVector> train_vecs);

// Greedy maximal marginal relevance: the first pick is the plain cosine
// argmax; each later pick maximizes
//   lambda * cos(i, query) - (1 - lambda) * max_{j selected} cos(i, j).
// All ties break to the ascending index.
DemonstrationSet mmr_k(const EmbeddingVector& query_vec,
                       std::span<const EmbeddingVector> train_vecs, int k, double lambda);

}  // namespace ids
