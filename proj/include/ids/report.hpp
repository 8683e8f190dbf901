// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ids {

struct RunSummary {
  std::string run_id;
  nlohmann::json config;
  nlohmann::json metrics;
};

RunSummary load_run_summary(const std::filesystem::path& run_dir);

// Accuracy, similarity, diversity, overlap and call-count columns per run.
// Overlap cells are blank (with a note) when the requested iteration exceeds
// what a run recorded.
std::string render_report_table(const std::vector<RunSummary>& runs, int overlap_iteration);
std::string render_report_csv(const std::vector<RunSummary>& runs, int overlap_iteration);

}  // namespace ids
