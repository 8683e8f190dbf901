// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ids/util.hpp"

namespace ids {

enum class TaskFamily {
  topic_classification,
  question_answering,
  commonsense_reasoning,
  logical_reasoning,
  mathematical_reasoning,
};

// Task family plus its label space and prompt surface. Mathematical
// reasoning has no finite label space (free-form numeric answers).
struct TaskKind {
  TaskFamily family;
  std::string name;
  std::string instruction;
  std::string input_field;                  // "Question", "Article", "Problem"
  std::string answer_field;                 // "Answer" or "Topic"
  std::vector<std::string> label_display;   // surface form, e.g. "A".."E"
  std::vector<std::string> label_space;     // normalized form, empty for math

  bool has_label_space() const { return !label_space.empty(); }
  bool is_choice_task() const;  // label space of single letters
  // "The response should follow the format: Answer: {A, B, C, D or E}\nReason: {reason}"
  // (the \n is the literal two-character sequence shown to the model).
  std::string answer_format_line() const;

  static TaskKind of(TaskFamily family);
  static std::optional<TaskKind> parse(const std::string& name);
  static const std::vector<std::string>& names();
};

struct Example {
  int id = 0;
  std::string input_text;  // includes folded answer choices when present
  std::string label_text;  // gold answer as loaded (trimmed)
};

struct Dataset {
  std::string name;
  TaskKind task;
  std::vector<Example> train;
  std::vector<Example> test;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Normalizes an answer for exact-match comparison: trim, case-fold, strip
// surrounding punctuation; numeric answers additionally drop commas and
// trailing ".0". Idempotent.
std::string normalize_answer(std::string_view text, const TaskKind& task);

// Canonical form of a free-form numeric answer, or nullopt when `text`
// is not a number ("1,200.50" -> "1200.5", "18.0" -> "18").
std::optional<std::string> canonicalize_number(std::string_view text);

// Loads one JSONL split. Each line: {"input": str, "label": str|num,
// "choices": [str,...]?}. Choices are folded into the input text as
// "Answer Choices: (A) ... (B) ...". Ids are sequential line indices.
std::vector<Example> load_examples(const std::filesystem::path& path, const TaskKind& task);

// Assembles a dataset and enforces train/test disjointness by content hash.
Dataset make_dataset(std::string name, const TaskKind& task, std::vector<Example> train,
                     std::vector<Example> test);

Dataset load_dataset(const std::filesystem::path& train_path,
                     const std::filesystem::path& test_path, const TaskKind& task,
                     std::string name = "");

// Deterministic seeded subsample; counts are clamped to the split sizes and
// parent ids are preserved. Selecting a whole split returns it unchanged
// regardless of seed.
Dataset subsample(const Dataset& d, size_t n_train, size_t n_test, uint64_t seed);

// Canonical JSONL serialization of the fields the loader consumes.
std::string to_jsonl_line(const Example& ex);

std::string content_hash(const Example& ex);

}  // namespace ids
