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

// Grid search over LM order and LM weight on a validation set.

#ifndef HTRLM_TUNE_H_
#define HTRLM_TUNE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htrlm/batch.h"
#include "htrlm/emissions.h"

namespace htrlm {

enum class Objective { kWer, kCer };

std::string_view ObjectiveName(Objective objective);
Objective ParseObjective(std::string_view name);

// "start:stop:step" (inclusive stop), a comma list, or a single value.
std::vector<double> ParseWeightRange(std::string_view text);

struct TuneGrid {
  std::vector<double> weights = ParseWeightRange("0:5:0.5");
  std::vector<int> orders = {1, 2, 3, 4, 5, 6};
  Objective objective = Objective::kWer;

  // Throws InvalidArgument on empty axes or negative weights.
  void Validate() const;
};

struct TuneItem {
  EmissionMatrix emissions;
  std::string reference;
};

struct TuneModel {
  const NGramModel* lm = nullptr;
  const LexiconTrie* trie = nullptr;  // subword and word levels only
};

struct TunePoint {
  int order = 0;
  double weight = 0.0;
  double cer = 0.0;
  double wer = 0.0;
  double objective = 0.0;
  double mean_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct TuneResult {
  std::vector<TunePoint> points;  // orders outer, weights inner
  std::optional<size_t> best;     // index into points; none if all failed
  Objective objective = Objective::kWer;

  std::string ToJson(int indent = 2) const;
};

// Decodes `items` at every grid point with `base` (beam search forced on)
// and returns the surface. The optimum minimizes the objective; ties go to
// the smaller weight, then the smaller order. A point fails if any item
// fails to decode.
TuneResult Tune(const std::vector<TuneItem>& items, const TuneGrid& grid,
                const std::map<int, TuneModel>& models, const DecodeSetup& base,
                size_t threads = 1);

}  // namespace htrlm

#endif  // HTRLM_TUNE_H_
