// Copyright 2026 The htrlm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "htrlm/metrics.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "htrlm/tokenizer.h"
#include "json.hpp"

namespace htrlm {

EditOps& EditOps::operator+=(const EditOps& other) {
  distance += other.distance;
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  return *this;
}

EditOps EditDistance(std::span<const std::string> reference,
                     std::span<const std::string> hypothesis) {
  const size_t n = reference.size();
  const size_t m = hypothesis.size();
  std::vector<size_t> d((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> size_t& { return d[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const size_t diagonal = at(i - 1, j - 1) + (reference[i - 1] != hypothesis[j - 1]);
      at(i, j) = std::min({diagonal, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditOps ops;
  ops.distance = at(n, m);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = reference[i - 1] == hypothesis[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + !same) {
        if (!same) ++ops.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions;
      --i;
    } else {
      ++ops.insertions;
      --j;
    }
  }
  return ops;
}

double ErrorRate(size_t distance, size_t reference_length) {
  return static_cast<double>(distance) / static_cast<double>(std::max<size_t>(reference_length, 1));
}

EvalReport Evaluate(const std::vector<EvalPair>& pairs) {
  EvalReport report;
  double seconds = 0.0;
  for (const EvalPair& pair : pairs) {
    EvalItem item;
    item.id = pair.id;
    item.reference = pair.reference;
    item.hypothesis = pair.hypothesis;
    item.seconds = pair.seconds;
    const TokenSequence ref_chars = TokenizeChars(pair.reference);
    const TokenSequence hyp_chars = TokenizeChars(pair.hypothesis);
    const std::vector<std::string> ref_words = SplitWhitespace(pair.reference);
    const std::vector<std::string> hyp_words = SplitWhitespace(pair.hypothesis);
    item.chars = EditDistance(ref_chars, hyp_chars);
    item.words = EditDistance(ref_words, hyp_words);
    item.reference_chars = ref_chars.size();
    item.reference_words = ref_words.size();

    report.chars += item.chars;
    report.words += item.words;
    report.reference_chars += item.reference_chars;
    report.reference_words += item.reference_words;
    seconds += item.seconds;
    report.items.push_back(std::move(item));
  }
  report.cer = ErrorRate(report.chars.distance, report.reference_chars);
  report.wer = ErrorRate(report.words.distance, report.reference_words);
  report.mean_seconds = pairs.empty() ? 0.0 : seconds / static_cast<double>(pairs.size());
  return report;
}

namespace {

nlohmann::json OpsJson(const EditOps& ops) {
  return {{"distance", ops.distance},
          {"substitutions", ops.substitutions},
          {"insertions", ops.insertions},
          {"deletions", ops.deletions}};
}

std::string Percent(double rate) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", rate * 100.0);
  return buffer;
}

}  // namespace

std::string EvalReport::ToJson(int indent) const {
  nlohmann::json items_json = nlohmann::json::array();
  for (const EvalItem& item : items) {
    items_json.push_back({{"id", item.id},
                          {"reference", item.reference},
                          {"hypothesis", item.hypothesis},
                          {"chars", OpsJson(item.chars)},
                          {"words", OpsJson(item.words)},
                          {"reference_chars", item.reference_chars},
                          {"reference_words", item.reference_words},
                          {"seconds", item.seconds}});
  }
  nlohmann::json out = {{"cer", cer},
                        {"wer", wer},
                        {"cer_percent", Percent(cer)},
                        {"wer_percent", Percent(wer)},
                        {"chars", OpsJson(chars)},
                        {"words", OpsJson(words)},
                        {"reference_chars", reference_chars},
                        {"reference_words", reference_words},
                        {"items_count", items.size()},
                        {"mean_seconds", mean_seconds},
                        {"items", items_json}};
  return out.dump(indent);
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-8s %8s %8s %6s %6s %6s %10s\n", "metric", "rate(%)",
                "errors", "sub", "ins", "del", "ref_len");
  out << line;
  std::snprintf(line, sizeof(line), "%-8s %8s %8zu %6zu %6zu %6zu %10zu\n", "CER",
                Percent(cer).c_str(), chars.distance, chars.substitutions,
                chars.insertions, chars.deletions, reference_chars);
  out << line;
  std::snprintf(line, sizeof(line), "%-8s %8s %8zu %6zu %6zu %6zu %10zu\n", "WER",
                Percent(wer).c_str(), words.distance, words.substitutions,
                words.insertions, words.deletions, reference_words);
  out << line;
  std::snprintf(line, sizeof(line), "items: %zu  mean seconds/item: %.6f\n", items.size(),
                mean_seconds);
  out << line;
  return out.str();
}

}  // namespace htrlm
