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

#ifndef HTRLM_EMISSIONS_H_
#define HTRLM_EMISSIONS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace htrlm {

inline constexpr std::string_view kBlankSymbol = "<ctc>";
inline constexpr std::string_view kEosSymbol = "<eos>";
inline constexpr double kRowNormTolerance = 1e-4;

enum class FrameMode { kCtc, kS2S };

std::string_view FrameModeName(FrameMode mode);

// T x V natural-log posteriors, row-major. The vocabulary names each column;
// it contains exactly one of "<ctc>" (CTC output) or "<eos>" (seq2seq output),
// which fixes the mode. The constructor rejects shape errors (ShapeMismatch),
// a missing or doubled special symbol (ModeMismatch) and rows whose
// log-sum-exp is further than 1e-4 from 0 (UnnormalizedRows).
class EmissionMatrix {
 public:
  EmissionMatrix(std::vector<float> log_probs, size_t frames,
                 std::vector<std::string> vocab);

  size_t frames() const { return frames_; }
  size_t symbols() const { return vocab_.size(); }
  FrameMode mode() const { return mode_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<float>& data() const { return data_; }

  // Column of "<ctc>" (CTC) or "<eos>" (S2S).
  size_t special_index() const { return special_; }

  std::span<const float> row(size_t t) const {
    return {data_.data() + t * vocab_.size(), vocab_.size()};
  }
  float at(size_t t, size_t v) const { return data_[t * vocab_.size() + v]; }

  bool operator==(const EmissionMatrix& other) const = default;

 private:
  std::vector<float> data_;
  size_t frames_;
  std::vector<std::string> vocab_;
  FrameMode mode_;
  size_t special_;
};

double LogSumExp(std::span<const float> values);
double LogAddExp(double a, double b);

// Symbols for a sequence of columns, concatenated with "▁" turned into spaces.
std::string LabelsToText(const std::vector<std::string>& vocab,
                         std::span<const int> labels);

}  // namespace htrlm

#endif  // HTRLM_EMISSIONS_H_
