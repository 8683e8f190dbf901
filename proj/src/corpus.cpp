// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace ids {

using nlohmann::json;

bool TaskKind::is_choice_task() const {
  return !label_space.empty() && label_space.front().size() == 1 &&
         std::isalpha(static_cast<unsigned char>(label_space.front()[0]));
}

namespace {

std::string join_or(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " or " : ", ";
    out += items[i];
  }
  return out;
}

std::vector<std::string> letters_upto(char last) {
  std::vector<std::string> out;
  for (char c = 'A'; c <= last; ++c) out.emplace_back(1, c);
  return out;
}

std::vector<std::string> normalized(const TaskKind& t, const std::vector<std::string>& display) {
  std::vector<std::string> out;
  out.reserve(display.size());
  for (const auto& d : display) out.push_back(normalize_answer(d, t));
  return out;
}

}  // namespace

std::string TaskKind::answer_format_line() const {
  std::string braces = has_label_space() ? "{" + join_or(label_display) + "}"
                                         : std::string("{arabic numerals}");
  return "The response should follow the format: " + answer_field + ": " + braces +
         "\\nReason: {reason}";
}

TaskKind TaskKind::of(TaskFamily family) {
  TaskKind t;
  t.family = family;
  switch (family) {
    case TaskFamily::topic_classification:
      t.name = "topic_classification";
      t.instruction = "What is the topic of the following article?";
      t.input_field = "Article";
      t.answer_field = "Topic";
      t.label_display = {"world", "sports", "business", "technology"};
      break;
    case TaskFamily::question_answering:
      t.name = "question_answering";
      t.instruction = "Read the passage and answer the question with yes or no.";
      t.input_field = "Question";
      t.answer_field = "Answer";
      t.label_display = {"yes", "no"};
      break;
    case TaskFamily::commonsense_reasoning:
      t.name = "commonsense_reasoning";
      t.instruction = "Which choice is the correct answer to the question?";
      t.input_field = "Question";
      t.answer_field = "Answer";
      t.label_display = letters_upto('E');
      break;
    case TaskFamily::logical_reasoning:
      t.name = "logical_reasoning";
      t.instruction =
          "Based on the given context, which choice is the correct answer to the question?";
      t.input_field = "Question";
      t.answer_field = "Answer";
      t.label_display = letters_upto('D');
      break;
    case TaskFamily::mathematical_reasoning:
      t.name = "mathematical_reasoning";
      t.instruction = "Solve the following math problem.";
      t.input_field = "Problem";
      t.answer_field = "Answer";
      break;
  }
  t.label_space = normalized(t, t.label_display);
  return t;
}

const std::vector<std::string>& TaskKind::names() {
  static const std::vector<std::string> kNames = {
      "topic_classification", "question_answering", "commonsense_reasoning",
      "logical_reasoning", "mathematical_reasoning"};
  return kNames;
}

std::optional<TaskKind> TaskKind::parse(const std::string& name) {
  static const std::unordered_map<std::string, TaskFamily> kMap = {
      {"topic_classification", TaskFamily::topic_classification},
      {"question_answering", TaskFamily::question_answering},
      {"commonsense_reasoning", TaskFamily::commonsense_reasoning},
      {"logical_reasoning", TaskFamily::logical_reasoning},
      {"mathematical_reasoning", TaskFamily::mathematical_reasoning},
  };
  auto it = kMap.find(name);
  if (it == kMap.end()) return std::nullopt;
  return of(it->second);
}

std::optional<std::string> canonicalize_number(std::string_view text) {
  std::string s = strip_surrounding_punct(trim(text));
  std::string digits;
  digits.reserve(s.size());
  for (char c : s) {
    if (c == ',') continue;  // thousands separators
    digits.push_back(c);
  }
  size_t i = 0;
  std::string sign;
  if (i < digits.size() && (digits[i] == '-' || digits[i] == '+')) {
    if (digits[i] == '-') sign = "-";
    ++i;
  }
  std::string int_part, frac_part;
  while (i < digits.size() && std::isdigit(static_cast<unsigned char>(digits[i])))
    int_part.push_back(digits[i++]);
  if (i < digits.size() && digits[i] == '.') {
    ++i;
    while (i < digits.size() && std::isdigit(static_cast<unsigned char>(digits[i])))
      frac_part.push_back(digits[i++]);
  }
  if (i != digits.size() || (int_part.empty() && frac_part.empty())) return std::nullopt;
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  while (int_part.size() > 1 && int_part.front() == '0') int_part.erase(int_part.begin());
  if (int_part.empty()) int_part = "0";
  std::string out = int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  if (out == "0") return out;  // no negative zero
  return sign + out;
}

std::string normalize_answer(std::string_view text, const TaskKind& task) {
  std::string s = strip_surrounding_punct(trim(to_lower(text)));
  s = trim(s);
  if (task.family == TaskFamily::mathematical_reasoning) {
    if (auto num = canonicalize_number(s)) return *num;
  }
  return s;
}

std::string content_hash(const Example& ex) {
  return sha256_hex(ex.input_text + "\x1f" + ex.label_text);
}

namespace {

std::string fold_choices(const std::string& input, const json& choices, int line_no) {
  if (!choices.is_array() || choices.empty())
    throw SchemaError("line " + std::to_string(line_no) + ": `choices` must be a non-empty array");
  if (choices.size() > 26)
    throw SchemaError("line " + std::to_string(line_no) + ": too many choices");
  std::string out = input + " Answer Choices:";
  char letter = 'A';
  for (const auto& c : choices) {
    if (!c.is_string())
      throw SchemaError("line " + std::to_string(line_no) + ": choices must be strings");
    out += " (";
    out += letter++;
    out += ") " + c.get<std::string>();
  }
  return out;
}

std::string label_to_string(const json& label, int line_no) {
  if (label.is_string()) return label.get<std::string>();
  if (label.is_number_integer()) return std::to_string(label.get<long long>());
  if (label.is_number_float()) {
    json j = label;
    return j.dump();
  }
  if (label.is_boolean()) return label.get<bool>() ? "yes" : "no";
  throw SchemaError("line " + std::to_string(line_no) + ": `label` must be a string or number");
}

}  // namespace

std::vector<Example> load_examples(const std::filesystem::path& path, const TaskKind& task) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path.string());
  std::vector<Example> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object())
      throw SchemaError("line " + std::to_string(line_no) + ": expected a JSON object");
    if (!j.contains("input") || !j["input"].is_string())
      throw SchemaError("line " + std::to_string(line_no) + ": missing string field `input`");
    if (!j.contains("label"))
      throw SchemaError("line " + std::to_string(line_no) + ": missing field `label`");

    Example ex;
    ex.id = static_cast<int>(out.size());
    ex.input_text = j["input"].get<std::string>();
    if (j.contains("choices") && !j["choices"].is_null())
      ex.input_text = fold_choices(ex.input_text, j["choices"], line_no);
    if (trim(ex.input_text).empty())
      throw SchemaError("line " + std::to_string(line_no) + ": empty `input`");
    ex.label_text = trim(label_to_string(j["label"], line_no));

    std::string norm = normalize_answer(ex.label_text, task);
    if (norm.empty())
      throw SchemaError("line " + std::to_string(line_no) + ": label normalizes to empty");
    if (task.has_label_space() &&
        std::find(task.label_space.begin(), task.label_space.end(), norm) ==
            task.label_space.end()) {
      throw SchemaError("line " + std::to_string(line_no) + ": label `" + ex.label_text +
                        "` not in the " + task.name + " label space");
    }
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw SchemaError("empty split: " + path.string());
  return out;
}

Dataset make_dataset(std::string name, const TaskKind& task, std::vector<Example> train,
                     std::vector<Example> test) {
  if (train.empty() || test.empty()) throw SchemaError("dataset splits must be non-empty");
  std::unordered_set<std::string> train_hashes;
  train_hashes.reserve(train.size());
  for (const auto& ex : train) train_hashes.insert(content_hash(ex));
  for (const auto& ex : test) {
    if (train_hashes.count(content_hash(ex))) {
      throw SchemaError("train/test splits are not disjoint: test example " +
                        std::to_string(ex.id) + " duplicates a training example");
    }
  }
  Dataset d;
  d.name = std::move(name);
  d.task = task;
  d.train = std::move(train);
  d.test = std::move(test);
  return d;
}

Dataset load_dataset(const std::filesystem::path& train_path,
                     const std::filesystem::path& test_path, const TaskKind& task,
                     std::string name) {
  if (name.empty()) name = train_path.stem().string();
  return make_dataset(std::move(name), task, load_examples(train_path, task),
                      load_examples(test_path, task));
}

namespace {

// Seeded choice of n indices out of size, emitted in original order so the
// whole-split case is the identity.
std::vector<Example> pick(const std::vector<Example>& split, size_t n, Rng& rng) {
  n = std::min(n, split.size());
  if (n == split.size()) return split;
  std::vector<size_t> idx(split.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (size_t i = 0; i < n; ++i) {
    size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<Example> out;
  out.reserve(n);
  for (size_t i : idx) out.push_back(split[i]);
  return out;
}

}  // namespace

Dataset subsample(const Dataset& d, size_t n_train, size_t n_test, uint64_t seed) {
  Dataset out;
  out.name = d.name;
  out.task = d.task;
  Rng train_rng(derive_seed(seed, 1));
  Rng test_rng(derive_seed(seed, 2));
  out.train = pick(d.train, n_train, train_rng);
  out.test = pick(d.test, n_test, test_rng);
  return out;
}

std::string to_jsonl_line(const Example& ex) {
  json j;
  j["input"] = ex.input_text;
  j["label"] = ex.label_text;
  return j.dump();
}

}  // namespace ids
