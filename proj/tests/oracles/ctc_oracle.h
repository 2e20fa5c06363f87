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

// Brute-force CTC decoding: enumerate every alignment, collapse it, and sum
// probabilities per labeling. Exponential in T; for tiny matrices only.

#ifndef HTRLM_TESTS_ORACLES_CTC_ORACLE_H_
#define HTRLM_TESTS_ORACLES_CTC_ORACLE_H_

#include <map>
#include <vector>

#include "htrlm/emissions.h"
#include "htrlm/ngram.h"

namespace htrlm::oracle {

// ln P(labeling) for every labeling with non-zero mass.
std::map<std::vector<int>, double> LabelingMarginals(const EmissionMatrix& emissions);

struct OracleHypothesis {
  std::vector<int> labels;
  double score = 0.0;
};

// Every labeling scored as ln P + weight * ln(10) * log10 P_LM(chars + </s>)
// + insertion * |labels|, best first; ties go to the lexicographically
// smaller labeling. lm may be null or weight 0 (acoustic only).
std::vector<OracleHypothesis> RankLabelings(const EmissionMatrix& emissions,
                                            const NGramModel* lm, double weight,
                                            double insertion = 0.0);

}  // namespace htrlm::oracle

#endif  // HTRLM_TESTS_ORACLES_CTC_ORACLE_H_
