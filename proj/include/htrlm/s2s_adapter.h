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

// Turns seq2seq posteriors into a CTC matrix so the CTC decoders can run on
// them. Every content frame is preceded by an inserted, near-certain blank
// frame, so genuine repeats ("ll") survive the CTC collapse.

#ifndef HTRLM_S2S_ADAPTER_H_
#define HTRLM_S2S_ADAPTER_H_

#include <cmath>

#include "htrlm/emissions.h"

namespace htrlm {

enum class EosPolicy {
  kTruncateAtGreedyEos,  // drop the first argmax-EOS frame and everything after
  kKeepAll,
};

struct AdapterConfig {
  // Blank log-prob on inserted frames; the rest is spread over other columns.
  double blank_fill = std::log1p(-1e-7);
  // Blank probability given to content frames before renormalization.
  double content_blank = 1e-7;
  EosPolicy eos_policy = EosPolicy::kTruncateAtGreedyEos;
};

// Output vocabulary: "<ctc>" at column 0, then the input symbols without
// "<eos>" in their original order. Throws ModeMismatch on CTC input.
EmissionMatrix AdaptS2S(const EmissionMatrix& emissions,
                        const AdapterConfig& config = {});

}  // namespace htrlm

#endif  // HTRLM_S2S_ADAPTER_H_
