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

#include "htrlm/emissions.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "htrlm/error.h"
#include "htrlm/tokenizer.h"

namespace htrlm {

std::string_view FrameModeName(FrameMode mode) {
  return mode == FrameMode::kCtc ? "ctc" : "s2s";
}

double LogSumExp(std::span<const float> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (std::isinf(max)) return max;
  double sum = 0.0;
  for (float v : values) sum += std::exp(static_cast<double>(v) - max);
  return max + std::log(sum);
}

double LogAddExp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(b) && b < 0) return a;
  return a + std::log1p(std::exp(b - a));
}

EmissionMatrix::EmissionMatrix(std::vector<float> log_probs, size_t frames,
                               std::vector<std::string> vocab)
    : data_(std::move(log_probs)), frames_(frames), vocab_(std::move(vocab)) {
  if (vocab_.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "emission vocabulary is empty");
  }
  if (data_.size() != frames_ * vocab_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(data_.size()) + " values for a " +
                    std::to_string(frames_) + "x" + std::to_string(vocab_.size()) +
                    " matrix");
  }
  const auto blank = std::count(vocab_.begin(), vocab_.end(), kBlankSymbol);
  const auto eos = std::count(vocab_.begin(), vocab_.end(), kEosSymbol);
  if (blank + eos != 1) {
    throw Error(ErrorCode::kModeMismatch,
                "vocabulary must contain exactly one of <ctc> or <eos>");
  }
  mode_ = blank ? FrameMode::kCtc : FrameMode::kS2S;
  const std::string_view special = blank ? kBlankSymbol : kEosSymbol;
  special_ = static_cast<size_t>(
      std::find(vocab_.begin(), vocab_.end(), special) - vocab_.begin());

  double worst = 0.0;
  size_t worst_row = 0;
  for (size_t t = 0; t < frames_; ++t) {
    const double deviation = std::abs(LogSumExp(row(t)));
    if (!(deviation <= worst)) {
      worst = deviation;
      worst_row = t;
    }
  }
  if (!(worst <= kRowNormTolerance)) {
    throw Error(ErrorCode::kUnnormalizedRows,
                "row " + std::to_string(worst_row) +
                    " log-sum-exp deviates from 0 by " + std::to_string(worst));
  }
}

std::string LabelsToText(const std::vector<std::string>& vocab,
                         std::span<const int> labels) {
  std::vector<std::string> tokens;
  tokens.reserve(labels.size());
  for (int label : labels) tokens.push_back(vocab.at(label));
  return Detokenize(tokens, TokenizationLevel::kCharacter);
}

}  // namespace htrlm
