// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#include "ids/parse.hpp"

#include <algorithm>
#include <cctype>

namespace ids {

namespace {

size_t find_last_ci(const std::string& haystack, const std::string& needle) {
  if (needle.empty() || haystack.size() < needle.size()) return std::string::npos;
  std::string h = to_lower(haystack);
  std::string n = to_lower(needle);
  return h.rfind(n);
}

std::string line_after(const std::string& text, size_t pos) {
  size_t end = text.find('\n', pos);
  if (end == std::string::npos) end = text.size();
  return trim(text.substr(pos, end - pos));
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// First standalone choice letter on the line ("D", "(b)", "B.") that falls
// inside the label space.
std::optional<std::string> extract_choice_letter(const std::string& line, const TaskKind& task) {
  for (size_t i = 0; i < line.size(); ++i) {
    char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(line[i])));
    if (!std::isalpha(static_cast<unsigned char>(line[i]))) continue;
    bool standalone = (i == 0 || !is_word_char(line[i - 1])) &&
                      (i + 1 == line.size() || !is_word_char(line[i + 1]));
    if (!standalone) continue;
    std::string letter(1, lower);
    if (std::find(task.label_space.begin(), task.label_space.end(), letter) !=
        task.label_space.end())
      return letter;
  }
  return std::nullopt;
}

// First label-space word on the line, for non-letter label spaces.
std::optional<std::string> extract_label_word(const std::string& line, const TaskKind& task) {
  std::string lower = to_lower(line);
  size_t best_pos = std::string::npos;
  std::string best;
  for (const auto& label : task.label_space) {
    size_t pos = 0;
    while ((pos = lower.find(label, pos)) != std::string::npos) {
      bool standalone = (pos == 0 || !is_word_char(lower[pos - 1])) &&
                        (pos + label.size() == lower.size() ||
                         !is_word_char(lower[pos + label.size()]));
      if (standalone) {
        if (pos < best_pos) {
          best_pos = pos;
          best = label;
        }
        break;
      }
      ++pos;
    }
  }
  if (best_pos == std::string::npos) return std::nullopt;
  return best;
}

// Last numeric literal on the line, canonicalized.
std::optional<std::string> extract_number(const std::string& line) {
  std::optional<std::string> last;
  size_t i = 0;
  while (i < line.size()) {
    bool digit_start = std::isdigit(static_cast<unsigned char>(line[i])) ||
                       (line[i] == '.' && i + 1 < line.size() &&
                        std::isdigit(static_cast<unsigned char>(line[i + 1])));
    bool signed_start = (line[i] == '-' || line[i] == '+') && i + 1 < line.size() &&
                        (std::isdigit(static_cast<unsigned char>(line[i + 1])) ||
                         (line[i + 1] == '.' && i + 2 < line.size() &&
                          std::isdigit(static_cast<unsigned char>(line[i + 2]))));
    if (!digit_start && !signed_start) {
      ++i;
      continue;
    }
    size_t start = i;
    if (signed_start) ++i;
    bool seen_dot = false;
    while (i < line.size()) {
      char c = line[i];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == ',') {
        ++i;
      } else if (c == '.' && !seen_dot && i + 1 < line.size() &&
                 std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
        seen_dot = true;
        ++i;
      } else {
        break;
      }
    }
    if (auto canon = canonicalize_number(line.substr(start, i - start))) last = canon;
  }
  return last;
}

std::optional<std::string> extract_answer(const std::string& line, const TaskKind& task) {
  if (task.family == TaskFamily::mathematical_reasoning) return extract_number(line);
  if (task.is_choice_task()) return extract_choice_letter(line, task);

  std::string norm = normalize_answer(line, task);
  if (std::find(task.label_space.begin(), task.label_space.end(), norm) !=
      task.label_space.end())
    return norm;
  return extract_label_word(line, task);
}

}  // namespace

ParsedResponse parse_response(const std::string& raw, const TaskKind& task) {
  ParsedResponse out;
  out.raw = raw;

  const std::string marker = task.answer_field + ":";
  size_t pos = find_last_ci(raw, marker);
  if (pos != std::string::npos)
    out.answer = extract_answer(line_after(raw, pos + marker.size()), task);

  size_t rpos = find_last_ci(raw, "Reason:");
  if (rpos != std::string::npos) out.reason = trim(raw.substr(rpos + 7));
  if (out.reason.empty()) out.reason = raw;
  if (out.reason.empty()) out.reason = "(empty)";
  return out;
}

}  // namespace ids
