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

#include "htrlm/s2s_adapter.h"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "htrlm/error.h"

namespace htrlm {

EmissionMatrix AdaptS2S(const EmissionMatrix& emissions, const AdapterConfig& config) {
  if (emissions.mode() != FrameMode::kS2S) {
    throw Error(ErrorCode::kModeMismatch, "the adapter expects seq2seq emissions");
  }
  if (!(config.blank_fill < 0.0) || !(config.content_blank > 0.0 && config.content_blank < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "adapter probabilities must lie in (0, 1)");
  }
  const size_t eos = emissions.special_index();
  const size_t in_cols = emissions.symbols();
  const size_t out_cols = in_cols;  // +blank, -eos

  size_t frames = emissions.frames();
  if (config.eos_policy == EosPolicy::kTruncateAtGreedyEos) {
    for (size_t t = 0; t < emissions.frames(); ++t) {
      const auto row = emissions.row(t);
      if (static_cast<size_t>(std::max_element(row.begin(), row.end()) - row.begin()) == eos) {
        frames = t;
        break;
      }
    }
  }

  std::vector<std::string> vocab{std::string(kBlankSymbol)};
  for (size_t c = 0; c < in_cols; ++c) {
    if (c != eos) vocab.push_back(emissions.vocab()[c]);
  }

  std::vector<float> data(2 * frames * out_cols);
  const double others = out_cols > 1 ? -std::expm1(config.blank_fill) / (out_cols - 1) : 0.0;
  const float inserted_other = static_cast<float>(std::log(others));
  const double content_log_blank = std::log(config.content_blank);
  const double content_log_keep = std::log1p(-config.content_blank);

  for (size_t t = 0; t < frames; ++t) {
    float* inserted = data.data() + 2 * t * out_cols;
    float* content = inserted + out_cols;
    inserted[0] = static_cast<float>(out_cols > 1 ? config.blank_fill : 0.0);
    std::fill(inserted + 1, inserted + out_cols, inserted_other);

    // Renormalize the non-EOS mass to 1 - content_blank.
    const auto row = emissions.row(t);
    double max = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < in_cols; ++c) {
      if (c != eos) max = std::max(max, static_cast<double>(row[c]));
    }
    double sum = 0.0;
    for (size_t c = 0; c < in_cols; ++c) {
      if (c != eos) sum += std::exp(row[c] - max);
    }
    // A row with all its mass on EOS (KeepAll) becomes uniform.
    const bool empty = std::isinf(max);
    const double log_norm = empty ? 0.0 : max + std::log(sum);
    const double uniform = -std::log(static_cast<double>(out_cols - 1));
    content[0] = static_cast<float>(out_cols > 1 ? content_log_blank : 0.0);
    size_t out = 1;
    for (size_t c = 0; c < in_cols; ++c) {
      if (c == eos) continue;
      const double value = empty ? uniform : row[c] - log_norm;
      content[out++] = static_cast<float>(value + content_log_keep);
    }
  }
  return EmissionMatrix(std::move(data), 2 * frames, std::move(vocab));
}

}  // namespace htrlm
