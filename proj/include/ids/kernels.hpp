// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "ids/embedding.hpp"

namespace ids::kernels {

// Data-parallel inner loops shared by the selectors and metrics. Each kernel
// parallelizes over independent elements, so results do not depend on the
// thread count; loops fall back to serial when already inside a parallel
// region (per-query workers) or when the input is small.

// Cosine of `query` against every corpus vector. Zero-norm corpus entries
// score 0.
std::vector<double> cosine_scores(const EmbeddingVector& query,
                                  std::span<const EmbeddingVector> corpus);

// Mean pairwise cosine over all i<j pairs.
double pairwise_similarity_mean(std::span<const EmbeddingVector> vecs);

// Index of the nearest centroid per point (squared Euclidean, ties to the
// lower centroid id).
std::vector<int> assign_to_nearest_centroid(std::span<const EmbeddingVector> points,
                                            std::span<const EmbeddingVector> centroids);

// Squared Euclidean distance from every point to `center`.
std::vector<double> squared_distances_to(std::span<const EmbeddingVector> points,
                                         const EmbeddingVector& center);

}  // namespace ids::kernels
