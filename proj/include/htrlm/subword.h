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

#ifndef HTRLM_SUBWORD_H_
#define HTRLM_SUBWORD_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "htrlm/tokenizer.h"

namespace htrlm {

// How spaces take part in subword units.
//  kSentencePiece:  "▁" is glued to the start of the following word ("▁numer").
//  kSeparateSpaces: "▁" is always a standalone token and never merged.
enum class SpaceMode { kSentencePiece, kSeparateSpaces };

std::string_view SpaceModeName(SpaceMode mode);  // "sentencepiece" / "separate-spaces"
SpaceMode ParseSpaceMode(std::string_view name);

using MergeRule = std::pair<std::string, std::string>;

// Deterministic byte-pair-encoding model.
//
// Training repeatedly merges the most frequent adjacent pair (ties go to the
// lexicographically smallest (left, right)) until the vocabulary reaches the
// requested size or no pair is left. Encoding replays the merges in training
// order, so it reproduces the segmentation seen during training.
class SubwordModel {
 public:
  static SubwordModel Train(const std::vector<std::string>& corpus,
                            size_t vocab_size,
                            SpaceMode space_mode = SpaceMode::kSeparateSpaces);

  // Text format:
  //   bpe-v1 <vocab_size> <space_mode>
  //   <left>\t<right>        (one merge per line, in order)
  //   <blank line>
  //   <vocab entry>          (one per line)
  static SubwordModel Read(std::istream& in);
  void Write(std::ostream& out) const;

  TokenSequence Tokenize(std::string_view text) const;

  const std::vector<MergeRule>& merges() const { return merges_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  bool Contains(std::string_view unit) const;
  size_t vocab_size_target() const { return vocab_size_target_; }
  SpaceMode space_mode() const { return space_mode_; }

 private:
  SubwordModel(std::vector<MergeRule> merges, std::vector<std::string> vocab,
               size_t vocab_size_target, SpaceMode space_mode);

  void ApplyMerges(std::vector<std::string>& symbols) const;

  std::vector<MergeRule> merges_;
  std::vector<std::string> vocab_;
  std::unordered_set<std::string> vocab_set_;
  // "left\tright" -> ascending merge ranks.
  std::map<std::string, std::vector<size_t>, std::less<>> ranks_;
  size_t vocab_size_target_;
  SpaceMode space_mode_;
};

}  // namespace htrlm

#endif  // HTRLM_SUBWORD_H_
