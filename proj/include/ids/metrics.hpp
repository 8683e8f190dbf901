// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ids/embedding.hpp"
#include "ids/trace.hpp"

namespace ids {

// Mean pairwise cosine over all i<j demonstration pairs. Requires k >= 2.
double pairwise_diversity(std::span<const EmbeddingVector> demo_vecs);

// Mean cosine between the query vector and each demonstration vector.
double query_demo_similarity(const EmbeddingVector& query_vec,
                             std::span<const EmbeddingVector> demo_vecs);

// Macro-averaged similarity diagnostics over a run: per query, demo-set
// values are averaged across iterations first, then across queries.
struct SimilarityReport {
  double avg_query_demo_similarity = 0.0;
  double avg_pairwise_similarity = 0.0;  // defined when demo sets have k >= 2
  struct PerQuery {
    int query_id = 0;
    double query_demo = 0.0;
    double pairwise = 0.0;
  };
  std::vector<PerQuery> per_query;
};

SimilarityReport similarity_report(
    const std::vector<IterationTrace>& traces, std::span<const EmbeddingVector> query_vecs,
    const std::function<const EmbeddingVector&(int)>& train_vec_by_id);

// Fraction of iteration-j demonstration slots whose index already appeared
// in an earlier iteration of the same query; the wrong variant restricts to
// indices whose earlier occurrence was in an iteration that answered
// incorrectly. Slots count with multiplicity.
struct OverlapReport {
  int at_iteration = 0;  // 1-based
  double prop_pre = 0.0;
  double prop_pre_wrong = 0.0;
};

OverlapReport overlap_proportions(
    const std::vector<IterationTrace>& traces, int at_iteration,
    const std::function<std::optional<std::string>(int)>& gold_by_query);

}  // namespace ids
