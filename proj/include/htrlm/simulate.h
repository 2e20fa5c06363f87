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

// A noisy-channel stand-in for an optical model: turns text into CTC
// emission matrices whose errors a language model can repair. It is a test
// and demonstration tool, not a model of handwriting.
//
// Each character occupies `frames_per_char` frames followed by one blank
// frame. A frame's logits are
//
//   margin * [column is the target] + tau * N(0, 1)
//
// over the target's confusion neighborhood (every column by default);
// columns outside the neighborhood get a flat -margin. On character frames
// the blank column additionally gets blank_affinity * margin. Rows are the
// log-softmax of the logits.

#ifndef HTRLM_SIMULATE_H_
#define HTRLM_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "htrlm/emissions.h"

namespace htrlm {

struct NoiseModel {
  double tau = 1.0;
  double margin = 5.0;
  double blank_affinity = 0.0;  // in [0, 1)
  size_t frames_per_char = 1;
  uint64_t seed = 0;
  // Symbol -> symbols it may be confused with. Empty map = uniform.
  std::map<std::string, std::vector<std::string>> neighborhood;

  // Throws InvalidArgument on tau <= 0, margin <= 0, blank_affinity outside
  // [0, 1) or frames_per_char == 0.
  void Validate() const;
};

// `vocab` must contain "<ctc>". A space may be spelled " " or "▁" in it.
// Throws UnknownCharacter for characters missing from `vocab`.
EmissionMatrix Synthesize(std::string_view text, const NoiseModel& noise,
                          const std::vector<std::string>& vocab);

// "<ctc>" followed by the sorted distinct characters of `lines` ("▁" for
// space).
std::vector<std::string> VocabFromText(const std::vector<std::string>& lines);

// Independent per-item seeds derived from one corpus seed.
uint64_t ItemSeed(uint64_t seed, size_t index);

}  // namespace htrlm

#endif  // HTRLM_SIMULATE_H_
