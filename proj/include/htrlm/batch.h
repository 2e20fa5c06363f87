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

// Decoding many matrices: per-item timing, per-item failures, threads.

#ifndef HTRLM_BATCH_H_
#define HTRLM_BATCH_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "htrlm/decoder.h"
#include "htrlm/emissions.h"
#include "htrlm/io.h"
#include "htrlm/s2s_adapter.h"

namespace htrlm {

// Runs fn(0) ... fn(n - 1) on up to `threads` threads (0 = hardware
// concurrency). The first exception is rethrown after all workers stop.
void ParallelFor(size_t n, size_t threads, const std::function<void(size_t)>& fn);

struct DecodeSetup {
  bool beam = false;  // false: greedy
  DecodeConfig config;
  const NGramModel* lm = nullptr;
  const LexiconTrie* trie = nullptr;
  bool adapt_s2s = false;
  AdapterConfig adapter;
};

struct DecodeOutcome {
  std::string text;
  double score = 0.0;
  double seconds = 0.0;  // adaptation + search
  std::vector<ScoredText> nbest;  // beam search only, best first
  std::optional<std::string> error;
  // Set when greedy seq2seq decoding never reached EOS.
  std::optional<std::string> warning;
};

// Greedy decoding uses the CTC or seq2seq rule matching the matrix mode.
// Errors are caught and returned in `error`.
DecodeOutcome DecodeMatrix(const EmissionMatrix& emissions, const DecodeSetup& setup);

// Loads and decodes every manifest item, preserving manifest order. Items
// whose file cannot be read fail individually.
std::vector<HypothesisRecord> DecodeManifest(const DatasetManifest& manifest,
                                             const DecodeSetup& setup, size_t threads);

}  // namespace htrlm

#endif  // HTRLM_BATCH_H_
