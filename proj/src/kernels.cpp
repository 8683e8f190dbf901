// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/kernels.hpp"

#include <omp.h>

#include <cmath>

namespace ids::kernels {

namespace {

constexpr long kMinParallelWork = 1 << 14;  // elements * dim below this stay serial

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline bool worth_parallel(size_t n, size_t dim) {
  return static_cast<long>(n) * static_cast<long>(dim) >= kMinParallelWork && !omp_in_parallel();
}

}  // namespace

namespace {

// Exceptions may not escape an OpenMP region, so shape checks happen up
// front and the loops themselves are throw-free.
void require_same_dim(std::span<const EmbeddingVector> vecs, size_t dim, const char* who) {
  for (size_t i = 0; i < vecs.size(); ++i) {
    if (vecs[i].dim() != dim)
      throw Error(std::string(who) + ": dimension mismatch at index " + std::to_string(i));
  }
}

}  // namespace

std::vector<double> cosine_scores(const EmbeddingVector& query,
                                  std::span<const EmbeddingVector> corpus) {
  if (query.norm == 0.0) throw Error("cosine_scores: zero-norm query");
  require_same_dim(corpus, query.dim(), "cosine_scores");
  std::vector<double> out(corpus.size());
  const long n = static_cast<long>(corpus.size());
  const bool par = worth_parallel(corpus.size(), query.dim());
#pragma omp parallel for schedule(static) if (par)
  for (long i = 0; i < n; ++i) {
    const EmbeddingVector& v = corpus[static_cast<size_t>(i)];
    out[static_cast<size_t>(i)] =
        v.norm == 0.0 ? 0.0 : dot(query.values, v.values) / (query.norm * v.norm);
  }
  return out;
}

double pairwise_similarity_mean(std::span<const EmbeddingVector> vecs) {
  const long n = static_cast<long>(vecs.size());
  if (n < 2) throw Error("pairwise_similarity_mean: need at least 2 vectors");
  const size_t dim = vecs.front().dim();
  require_same_dim(vecs, dim, "pairwise_similarity_mean");
  for (size_t i = 0; i < vecs.size(); ++i) {
    if (vecs[i].norm == 0.0)
      throw Error("pairwise_similarity_mean: zero-norm vector at index " + std::to_string(i));
  }
  double sum = 0.0;
  const bool par = worth_parallel(vecs.size() * vecs.size(), dim);
#pragma omp parallel for schedule(dynamic) reduction(+ : sum) if (par)
  for (long i = 0; i < n; ++i) {
    const EmbeddingVector& a = vecs[static_cast<size_t>(i)];
    for (long j = i + 1; j < n; ++j) {
      const EmbeddingVector& b = vecs[static_cast<size_t>(j)];
      sum += dot(a.values, b.values) / (a.norm * b.norm);
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return sum / pairs;
}

std::vector<int> assign_to_nearest_centroid(std::span<const EmbeddingVector> points,
                                            std::span<const EmbeddingVector> centroids) {
  if (centroids.empty()) throw Error("assign_to_nearest_centroid: no centroids");
  require_same_dim(points, centroids.front().dim(), "assign_to_nearest_centroid");
  require_same_dim(centroids, centroids.front().dim(), "assign_to_nearest_centroid");
  std::vector<int> out(points.size());
  const long n = static_cast<long>(points.size());
  const bool par = worth_parallel(points.size() * centroids.size(),
                                  points.empty() ? 0 : points.front().dim());
#pragma omp parallel for schedule(static) if (par)
  for (long i = 0; i < n; ++i) {
    const auto& p = points[static_cast<size_t>(i)].values;
    int best = 0;
    double best_d = sq_dist(p, centroids[0].values);
    for (size_t c = 1; c < centroids.size(); ++c) {
      double d = sq_dist(p, centroids[c].values);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[static_cast<size_t>(i)] = best;
  }
  return out;
}

std::vector<double> squared_distances_to(std::span<const EmbeddingVector> points,
                                         const EmbeddingVector& center) {
  std::vector<double> out(points.size());
  const long n = static_cast<long>(points.size());
  const bool par = worth_parallel(points.size(), center.dim());
#pragma omp parallel for schedule(static) if (par)
  for (long i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] = sq_dist(points[static_cast<size_t>(i)].values, center.values);
  return out;
}

}  // namespace ids::kernels
