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

#include "htrlm/batch.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "htrlm/error.h"

namespace htrlm {

void ParallelFor(size_t n, size_t threads, const std::function<void(size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;
  auto worker = [&] {
    for (size_t i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& thread : pool) thread.join();
  if (error) std::rethrow_exception(error);
}

DecodeOutcome DecodeMatrix(const EmissionMatrix& emissions, const DecodeSetup& setup) {
  DecodeOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    std::optional<EmissionMatrix> adapted;
    if (setup.adapt_s2s && emissions.mode() == FrameMode::kS2S) {
      adapted.emplace(AdaptS2S(emissions, setup.adapter));
    }
    const EmissionMatrix& matrix = adapted ? *adapted : emissions;
    if (!setup.beam) {
      if (matrix.mode() == FrameMode::kCtc) {
        outcome.text = LabelsToText(matrix.vocab(), GreedyCtc(matrix));
      } else {
        const GreedyS2SResult result = GreedyS2S(matrix);
        outcome.text = LabelsToText(matrix.vocab(), result.labels);
        if (!result.reached_eos) {
          outcome.warning = "no <eos> within " + std::to_string(matrix.frames()) +
                            " frames; kept every frame";
        }
      }
      outcome.score = BestPathScore(matrix);
    } else {
      if (matrix.mode() != FrameMode::kCtc) {
        throw Error(ErrorCode::kModeMismatch,
                    "beam search needs CTC emissions; use the seq2seq adapter");
      }
      const BeamDecoder decoder(setup.config, setup.lm, setup.trie, matrix.vocab());
      const std::vector<Hypothesis> hyps = decoder.Decode(matrix);
      outcome.text = hyps.front().text;
      outcome.score = hyps.front().score;
      for (const Hypothesis& hyp : hyps) outcome.nbest.push_back({hyp.text, hyp.score});
    }
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

std::vector<HypothesisRecord> DecodeManifest(const DatasetManifest& manifest,
                                             const DecodeSetup& setup, size_t threads) {
  std::vector<HypothesisRecord> records(manifest.size());
  ParallelFor(manifest.size(), threads, [&](size_t i) {
    HypothesisRecord& record = records[i];
    record.id = manifest[i].id;
    try {
      const EmissionMatrix emissions = ReadEmissions(manifest[i].emissions);
      DecodeOutcome outcome = DecodeMatrix(emissions, setup);
      record.text = std::move(outcome.text);
      record.score = outcome.score;
      record.seconds = outcome.seconds;
      record.error = std::move(outcome.error);
      record.warning = std::move(outcome.warning);
      record.nbest = std::move(outcome.nbest);
    } catch (const std::exception& e) {
      record.error = e.what();
    }
  });
  return records;
}

}  // namespace htrlm
