// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/report.hpp"

#include <iomanip>
#include <sstream>

#include "ids/util.hpp"

namespace ids {

using nlohmann::json;

RunSummary load_run_summary(const std::filesystem::path& run_dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(run_dir / "config.json") || !fs::exists(run_dir / "metrics.json"))
    throw Error("missing run: " + run_dir.string());
  RunSummary s;
  s.run_id = run_dir.filename().string();
  s.config = json::parse(read_file(run_dir / "config.json"));
  s.metrics = json::parse(read_file(run_dir / "metrics.json"));
  return s;
}

namespace {

struct Row {
  std::string run_id;
  std::string strategy;
  std::string accuracy;
  std::string correct;
  std::string abstained;
  std::string qd_sim;
  std::string pairwise;
  std::string prop_pre;
  std::string prop_pre_wrong;
  std::string chat_calls;
  std::string embed_calls;
  bool overlap_missing = false;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(prec) << v;
  return ss.str();
}

Row make_row(const RunSummary& run, int overlap_iteration) {
  Row r;
  r.run_id = run.run_id;
  r.strategy = run.config.value("strategy", std::string("?"));
  const json& acc = run.metrics.at("accuracy");
  r.accuracy = fmt(acc.at("accuracy").get<double>());
  r.correct = std::to_string(acc.at("correct").get<int>()) + "/" +
              std::to_string(acc.at("correct").get<int>() + acc.at("wrong").get<int>());
  r.abstained = std::to_string(acc.at("abstained").get<int>());
  const json& sim = run.metrics.at("similarity");
  r.qd_sim = fmt(sim.at("avg_query_demo_similarity").get<double>());
  r.pairwise = fmt(sim.at("avg_pairwise_similarity").get<double>());
  r.overlap_missing = true;
  for (const auto& o : run.metrics.at("overlap")) {
    if (o.at("at_iteration").get<int>() == overlap_iteration) {
      r.prop_pre = fmt(o.at("prop_pre").get<double>());
      r.prop_pre_wrong = fmt(o.at("prop_pre_wrong").get<double>());
      r.overlap_missing = false;
      break;
    }
  }
  const json& calls = run.metrics.at("calls");
  r.chat_calls = std::to_string(calls.at("chat_calls_total").get<int>());
  r.embed_calls = std::to_string(calls.at("path_embeddings_total").get<int>());
  return r;
}

const std::vector<std::string> kHeader = {
    "run",      "strategy",  "accuracy",      "correct",    "abstained", "qd_sim",
    "pairwise", "prop_pre",  "prop_pre_wrong", "chat_calls", "embed_calls"};

std::vector<std::string> to_cells(const Row& r) {
  return {r.run_id,  r.strategy, r.accuracy, r.correct,       r.abstained, r.qd_sim,
          r.pairwise, r.prop_pre, r.prop_pre_wrong, r.chat_calls, r.embed_calls};
}

}  // namespace

std::string render_report_table(const std::vector<RunSummary>& runs, int overlap_iteration) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back(kHeader);
  bool any_missing = false;
  for (const auto& run : runs) {
    Row r = make_row(run, overlap_iteration);
    any_missing = any_missing || r.overlap_missing;
    rows.push_back(to_cells(r));
  }
  std::vector<size_t> widths(kHeader.size(), 0);
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::ostringstream out;
  for (size_t ri = 0; ri < rows.size(); ++ri) {
    for (size_t c = 0; c < rows[ri].size(); ++c) {
      if (c > 0) out << "  ";
      out << std::left << std::setw(static_cast<int>(widths[c])) << rows[ri][c];
    }
    out << "\n";
    if (ri == 0) {
      for (size_t c = 0; c < widths.size(); ++c) {
        if (c > 0) out << "  ";
        out << std::string(widths[c], '-');
      }
      out << "\n";
    }
  }
  if (any_missing) {
    out << "note: overlap iteration " << overlap_iteration
        << " exceeds the recorded iterations for some runs; those cells are empty\n";
  }
  return out.str();
}

std::string render_report_csv(const std::vector<RunSummary>& runs, int overlap_iteration) {
  std::ostringstream out;
  for (size_t c = 0; c < kHeader.size(); ++c) {
    if (c > 0) out << ",";
    out << kHeader[c];
  }
  out << "\n";
  for (const auto& run : runs) {
    std::vector<std::string> cells = to_cells(make_row(run, overlap_iteration));
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << ",";
      out << cells[c];
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace ids
