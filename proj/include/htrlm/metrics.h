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

// Character and word error rates.
//
// CER compares NFC character sequences, WER compares whitespace-separated
// words. No case or punctuation normalization is applied. Corpus rates are
// total distance over total reference length.

#ifndef HTRLM_METRICS_H_
#define HTRLM_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace htrlm {

struct EditOps {
  size_t distance = 0;
  size_t substitutions = 0;
  size_t insertions = 0;
  size_t deletions = 0;

  EditOps& operator+=(const EditOps& other);
  bool operator==(const EditOps&) const = default;
};

// Levenshtein distance from `reference` to `hypothesis`. The breakdown
// follows one optimal path, preferring substitutions, then deletions, then
// insertions while tracing back from the end.
EditOps EditDistance(std::span<const std::string> reference,
                     std::span<const std::string> hypothesis);

struct EvalPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
  double seconds = 0.0;
};

struct EvalItem {
  std::string id;
  std::string reference;
  std::string hypothesis;
  EditOps chars;
  EditOps words;
  size_t reference_chars = 0;
  size_t reference_words = 0;
  double seconds = 0.0;
};

struct EvalReport {
  std::vector<EvalItem> items;
  EditOps chars;
  EditOps words;
  size_t reference_chars = 0;
  size_t reference_words = 0;
  double cer = 0.0;  // fraction, not percent
  double wer = 0.0;
  double mean_seconds = 0.0;

  std::string ToJson(int indent = 2) const;
  // Aligned text table with CER/WER in percent, two decimals.
  std::string ToTable() const;
};

// An empty reference counts as length 1 in the denominator, so a corpus of
// empty references scores the raw number of insertions.
double ErrorRate(size_t distance, size_t reference_length);

EvalReport Evaluate(const std::vector<EvalPair>& pairs);

}  // namespace htrlm

#endif  // HTRLM_METRICS_H_
