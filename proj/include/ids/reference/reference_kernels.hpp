// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "ids/embedding.hpp"

namespace ids::reference {

// Plain serial implementations with their own arithmetic, independent of the
// parallel kernels and selectors. Tests use them as oracles; the benchmark
// compares them against the production path.

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

std::vector<double> cosine_scores(const EmbeddingVector& query,
                                  std::span<const EmbeddingVector> corpus);

// Full-sort nearest neighbours: every cosine computed, all indices sorted by
// (descending cosine, ascending index), prefix of k returned.
std::vector<int> knn_full_sort(const EmbeddingVector& query,
                               std::span<const EmbeddingVector> corpus, int k);

// Doubly-nested mean pairwise cosine.
double pairwise_similarity_mean(std::span<const EmbeddingVector> vecs);

// Step-by-step greedy maximal-marginal-relevance selection: first pick is the
// cosine argmax; each later pick maximizes
//   lambda * cos(i, query) - (1 - lambda) * max_{j selected} cos(i, j),
// ties broken by ascending index.
std::vector<int> mmr_greedy(const EmbeddingVector& query,
                            std::span<const EmbeddingVector> corpus, int k, double lambda);

std::vector<int> assign_to_nearest_centroid(std::span<const EmbeddingVector> points,
                                            std::span<const EmbeddingVector> centroids);

// Sum of squared distances from each point to its assigned centroid.
double clustering_objective(std::span<const EmbeddingVector> points,
                            std::span<const EmbeddingVector> centroids,
                            std::span<const int> assignment);

}  // namespace ids::reference
