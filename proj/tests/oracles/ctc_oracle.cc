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

#include "ctc_oracle.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace htrlm::oracle {

std::map<std::vector<int>, double> LabelingMarginals(const EmissionMatrix& emissions) {
  const size_t frames = emissions.frames();
  const size_t symbols = emissions.symbols();
  const int blank = static_cast<int>(emissions.special_index());
  std::map<std::vector<int>, double> probability;

  std::vector<size_t> path(frames, 0);
  while (true) {
    double p = 1.0;
    for (size_t t = 0; t < frames; ++t) p *= std::exp(static_cast<double>(emissions.at(t, path[t])));
    std::vector<int> labels;
    for (size_t t = 0; t < frames; ++t) {
      const int s = static_cast<int>(path[t]);
      if (s != blank && (t == 0 || path[t - 1] != path[t])) labels.push_back(s);
    }
    probability[labels] += p;

    size_t t = 0;
    while (t < frames && ++path[t] == symbols) path[t++] = 0;
    if (t == frames) break;
  }

  std::map<std::vector<int>, double> marginals;
  for (const auto& [labels, p] : probability) {
    if (p > 0.0) marginals[labels] = std::log(p);
  }
  return marginals;
}

std::vector<OracleHypothesis> RankLabelings(const EmissionMatrix& emissions,
                                            const NGramModel* lm, double weight,
                                            double insertion) {
  std::vector<OracleHypothesis> ranked;
  for (const auto& [labels, log_p] : LabelingMarginals(emissions)) {
    double score = log_p + insertion * static_cast<double>(labels.size());
    if (lm != nullptr && weight != 0.0) {
      std::vector<std::string> chars;
      for (int label : labels) {
        const std::string& s = emissions.vocab()[label];
        chars.push_back(s == " " ? "▁" : s);
      }
      score += weight * std::log(10.0) * lm->ScoreSequence(chars);
    }
    ranked.push_back({labels, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.labels < b.labels;
  });
  return ranked;
}

}  // namespace htrlm::oracle
