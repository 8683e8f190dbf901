// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ids/kernels.hpp"
#include "ids/util.hpp"

namespace ids {

namespace {

void require_k(int k, size_t n, const char* who) {
  if (n == 0) throw Error(std::string(who) + ": empty corpus");
  if (k < 1 || static_cast<size_t>(k) > n)
    throw Error(std::string(who) + ": k=" + std::to_string(k) + " out of range for corpus of " +
                std::to_string(n));
}

}  // namespace

DemonstrationSet knn_top_k(const EmbeddingVector& query_vec,
                           std::span<const EmbeddingVector> train_vecs, int k) {
  require_k(k, train_vecs.size(), "knn_top_k");
  std::vector<double> scores = kernels::cosine_scores(query_vec, train_vecs);
  std::vector<int> order(train_vecs.size());
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)])
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  DemonstrationSet out;
  out.indices.assign(order.begin(), order.begin() + k);
  out.scores.reserve(static_cast<size_t>(k));
  for (int i : out.indices) out.scores.push_back(scores[static_cast<size_t>(i)]);
  return out;
}

DemonstrationSet random_k(int train_size, int k, uint64_t seed) {
  require_k(k, static_cast<size_t>(train_size), "random_k");
  Rng rng(seed);
  std::vector<int> pool(static_cast<size_t>(train_size));
  std::iota(pool.begin(), pool.end(), 0);
  DemonstrationSet out;
  out.indices.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    size_t j = static_cast<size_t>(i) + rng.below(pool.size() - static_cast<size_t>(i));
    std::swap(pool[static_cast<size_t>(i)], pool[j]);
    out.indices.push_back(pool[static_cast<size_t>(i)]);
  }
  return out;
}

namespace {

EmbeddingVector mean_of(std::span<const EmbeddingVector> points, const std::vector<int>& members) {
  std::vector<double> acc(points.front().dim(), 0.0);
  for (int m : members) {
    const auto& v = points[static_cast<size_t>(m)].values;
    for (size_t t = 0; t < acc.size(); ++t) acc[t] += v[t];
  }
  for (double& x : acc) x /= static_cast<double>(members.size());
  return EmbeddingVector::of(std::move(acc));
}

std::vector<std::vector<int>> members_of(const std::vector<int>& assignment, int k) {
  std::vector<std::vector<int>> clusters(static_cast<size_t>(k));
  for (size_t i = 0; i < assignment.size(); ++i)
    clusters[static_cast<size_t>(assignment[i])].push_back(static_cast<int>(i));
  return clusters;
}

double objective_of(std::span<const EmbeddingVector> points,
                    const std::vector<EmbeddingVector>& centroids,
                    const std::vector<int>& assignment) {
  double sum = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& c = centroids[static_cast<size_t>(assignment[i])].values;
    const auto& p = points[i].values;
    for (size_t t = 0; t < p.size(); ++t) {
      double d = p[t] - c[t];
      sum += d * d;
    }
  }
  return sum;
}

// Moves the globally farthest point into each empty cluster and pins the
// centroid on it, which strictly lowers the objective.
void repair_empty_clusters(std::span<const EmbeddingVector> points,
                           std::vector<EmbeddingVector>& centroids,
                           std::vector<int>& assignment, int k) {
  while (true) {
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int a : assignment) ++counts[static_cast<size_t>(a)];
    int empty = -1;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) {
        empty = c;
        break;
      }
    }
    if (empty < 0) return;
    int far = -1;
    double far_d = -1.0;
    for (size_t i = 0; i < points.size(); ++i) {
      // Skip points that are alone in their cluster; moving them would just
      // shift the hole.
      if (counts[static_cast<size_t>(assignment[i])] <= 1) continue;
      const auto& c = centroids[static_cast<size_t>(assignment[i])].values;
      const auto& p = points[i].values;
      double d = 0.0;
      for (size_t t = 0; t < p.size(); ++t) {
        double diff = p[t] - c[t];
        d += diff * diff;
      }
      if (d > far_d) {
        far_d = d;
        far = static_cast<int>(i);
      }
    }
    if (far < 0) throw Error("kmeans_partition: cannot repair empty cluster");
    assignment[static_cast<size_t>(far)] = empty;
    centroids[static_cast<size_t>(empty)] = points[static_cast<size_t>(far)];
  }
}

}  // namespace

KMeansResult kmeans_partition(std::span<const EmbeddingVector> train_vecs, int k,
                              const KMeansConfig& cfg) {
  require_k(k, train_vecs.size(), "kmeans_partition");
  const size_t dim = train_vecs.front().dim();
  for (const auto& v : train_vecs) {
    if (v.dim() != dim) throw Error("kmeans_partition: dimension mismatch");
  }

  // Farthest-point seeding from a seeded initial pick.
  Rng rng(cfg.seed);
  std::vector<EmbeddingVector> centroids;
  centroids.reserve(static_cast<size_t>(k));
  centroids.push_back(train_vecs[rng.below(train_vecs.size())]);
  std::vector<double> min_d = kernels::squared_distances_to(train_vecs, centroids.back());
  while (centroids.size() < static_cast<size_t>(k)) {
    int far = 0;
    for (size_t i = 1; i < min_d.size(); ++i) {
      if (min_d[i] > min_d[static_cast<size_t>(far)]) far = static_cast<int>(i);
    }
    if (min_d[static_cast<size_t>(far)] == 0.0)
      throw Error("kmeans_partition: degenerate corpus, fewer than k=" + std::to_string(k) +
                  " distinct vectors");
    centroids.push_back(train_vecs[static_cast<size_t>(far)]);
    std::vector<double> d2 = kernels::squared_distances_to(train_vecs, centroids.back());
    for (size_t i = 0; i < min_d.size(); ++i) min_d[i] = std::min(min_d[i], d2[i]);
  }

  KMeansResult res;
  res.assignment = kernels::assign_to_nearest_centroid(train_vecs, centroids);
  repair_empty_clusters(train_vecs, centroids, res.assignment, k);
  res.objective_history.push_back(objective_of(train_vecs, centroids, res.assignment));

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    std::vector<std::vector<int>> clusters = members_of(res.assignment, k);
    double max_shift_sq = 0.0;
    for (int c = 0; c < k; ++c) {
      EmbeddingVector updated = mean_of(train_vecs, clusters[static_cast<size_t>(c)]);
      double shift = 0.0;
      for (size_t t = 0; t < dim; ++t) {
        double d = updated.values[t] - centroids[static_cast<size_t>(c)].values[t];
        shift += d * d;
      }
      max_shift_sq = std::max(max_shift_sq, shift);
      centroids[static_cast<size_t>(c)] = std::move(updated);
    }

    std::vector<int> next = kernels::assign_to_nearest_centroid(train_vecs, centroids);
    repair_empty_clusters(train_vecs, centroids, next, k);
    res.objective_history.push_back(objective_of(train_vecs, centroids, next));
    bool changed = (next != res.assignment);
    res.assignment = std::move(next);
    if (!changed) break;
    if (std::sqrt(max_shift_sq) < cfg.tol) break;
  }

  res.centroids = std::move(centroids);
  res.clusters = members_of(res.assignment, k);
  return res;
}

DemonstrationSet cluster_representatives(const KMeansResult& clusters,
                                         std::span<const EmbeddingVector> train_vecs) {
  DemonstrationSet out;
  out.indices.reserve(clusters.clusters.size());
  for (size_t c = 0; c < clusters.clusters.size(); ++c) {
    const auto& members = clusters.clusters[c];
    if (members.empty()) throw Error("cluster_representatives: empty cluster");
    const auto& centroid = clusters.centroids[c].values;
    int best = members.front();
    double best_d = 0.0;
    bool first = true;
    for (int m : members) {
      const auto& p = train_vecs[static_cast<size_t>(m)].values;
      double d = 0.0;
      for (size_t t = 0; t < p.size(); ++t) {
        double diff = p[t] - centroid[t];
        d += diff * diff;
      }
      if (first || d < best_d) {  // members ascend, so ties keep the lower index
        best_d = d;
        best = m;
        first = false;
      }
    }
    out.indices.push_back(best);
  }
  return out;
}

DemonstrationSet mmr_k(const EmbeddingVector& query_vec,
                       std::span<const EmbeddingVector> train_vecs, int k, double lambda) {
  require_k(k, train_vecs.size(), "mmr_k");
  if (lambda < 0.0 || lambda > 1.0)
    throw Error("mmr_k: lambda must lie in [0, 1], got " + std::to_string(lambda));
  const size_t n = train_vecs.size();
  std::vector<double> relevance = kernels::cosine_scores(query_vec, train_vecs);
  std::vector<double> max_sim(n, -std::numeric_limits<double>::infinity());
  std::vector<bool> selected(n, false);

  DemonstrationSet out;
  out.indices.reserve(static_cast<size_t>(k));
  out.scores.reserve(static_cast<size_t>(k));
  for (int step = 0; step < k; ++step) {
    int best = -1;
    double best_score = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (selected[i]) continue;
      double score = (step == 0) ? relevance[i]
                                 : lambda * relevance[i] - (1.0 - lambda) * max_sim[i];
      if (best < 0 || score > best_score) {
        best = static_cast<int>(i);
        best_score = score;
      }
    }
    selected[static_cast<size_t>(best)] = true;
    out.indices.push_back(best);
    out.scores.push_back(best_score);
    if (step + 1 < k) {
      std::vector<double> sims =
          kernels::cosine_scores(train_vecs[static_cast<size_t>(best)], train_vecs);
      for (size_t i = 0; i < n; ++i) max_sim[i] = std::max(max_sim[i], sims[i]);
    }
  }
  return out;
}

}  // namespace ids
