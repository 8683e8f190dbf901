// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/metrics.hpp"

#include <unordered_set>

#include "ids/kernels.hpp"

namespace ids {

double pairwise_diversity(std::span<const EmbeddingVector> demo_vecs) {
  if (demo_vecs.size() < 2) throw Error("pairwise_diversity: need k >= 2 demonstrations");
  return kernels::pairwise_similarity_mean(demo_vecs);
}

double query_demo_similarity(const EmbeddingVector& query_vec,
                             std::span<const EmbeddingVector> demo_vecs) {
  if (demo_vecs.empty()) throw Error("query_demo_similarity: no demonstrations");
  std::vector<double> scores = kernels::cosine_scores(query_vec, demo_vecs);
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

SimilarityReport similarity_report(
    const std::vector<IterationTrace>& traces, std::span<const EmbeddingVector> query_vecs,
    const std::function<const EmbeddingVector&(int)>& train_vec_by_id) {
  if (traces.size() != query_vecs.size())
    throw Error("similarity_report: trace/query-vector count mismatch");
  SimilarityReport report;
  double qd_total = 0.0, pw_total = 0.0;
  size_t qd_queries = 0, pw_queries = 0;
  for (size_t qi = 0; qi < traces.size(); ++qi) {
    const IterationTrace& trace = traces[qi];
    double qd_sum = 0.0, pw_sum = 0.0;
    size_t qd_n = 0, pw_n = 0;
    for (const auto& step : trace.steps) {
      if (step.demo_indices.empty()) continue;
      std::vector<EmbeddingVector> demo_vecs;
      demo_vecs.reserve(step.demo_indices.size());
      for (int id : step.demo_indices) demo_vecs.push_back(train_vec_by_id(id));
      qd_sum += query_demo_similarity(query_vecs[qi], demo_vecs);
      ++qd_n;
      if (demo_vecs.size() >= 2) {
        pw_sum += pairwise_diversity(demo_vecs);
        ++pw_n;
      }
    }
    SimilarityReport::PerQuery pq;
    pq.query_id = trace.query_id;
    if (qd_n > 0) {
      pq.query_demo = qd_sum / static_cast<double>(qd_n);
      qd_total += pq.query_demo;
      ++qd_queries;
    }
    if (pw_n > 0) {
      pq.pairwise = pw_sum / static_cast<double>(pw_n);
      pw_total += pq.pairwise;
      ++pw_queries;
    }
    report.per_query.push_back(pq);
  }
  if (qd_queries > 0) report.avg_query_demo_similarity = qd_total / static_cast<double>(qd_queries);
  if (pw_queries > 0) report.avg_pairwise_similarity = pw_total / static_cast<double>(pw_queries);
  return report;
}

OverlapReport overlap_proportions(
    const std::vector<IterationTrace>& traces, int at_iteration,
    const std::function<std::optional<std::string>(int)>& gold_by_query) {
  if (at_iteration < 1) throw Error("overlap_proportions: iteration index is 1-based");
  OverlapReport report;
  report.at_iteration = at_iteration;
  size_t slots = 0, pre = 0, pre_wrong = 0;
  for (const auto& trace : traces) {
    if (static_cast<size_t>(at_iteration) > trace.steps.size())
      throw Error("overlap_proportions: trace for query " + std::to_string(trace.query_id) +
                  " has only " + std::to_string(trace.steps.size()) + " iterations, need " +
                  std::to_string(at_iteration));
    std::optional<std::string> gold = gold_by_query(trace.query_id);
    std::unordered_set<int> seen;
    std::unordered_set<int> seen_in_wrong;
    for (int j = 0; j + 1 < at_iteration; ++j) {
      const IterationStep& step = trace.steps[static_cast<size_t>(j)];
      bool wrong = !step.answer || !gold || *step.answer != *gold;
      for (int id : step.demo_indices) {
        seen.insert(id);
        if (wrong) seen_in_wrong.insert(id);
      }
    }
    const IterationStep& at = trace.steps[static_cast<size_t>(at_iteration - 1)];
    for (int id : at.demo_indices) {
      ++slots;
      if (seen.count(id)) ++pre;
      if (seen_in_wrong.count(id)) ++pre_wrong;
    }
  }
  if (slots > 0) {
    report.prop_pre = static_cast<double>(pre) / static_cast<double>(slots);
    report.prop_pre_wrong = static_cast<double>(pre_wrong) / static_cast<double>(slots);
  }
  return report;
}

}  // namespace ids
