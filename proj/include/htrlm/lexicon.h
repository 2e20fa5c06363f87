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

#ifndef HTRLM_LEXICON_H_
#define HTRLM_LEXICON_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "htrlm/ngram.h"
#include "htrlm/tokenizer.h"

namespace htrlm {

// LM unit -> character spelling ("▁" for spaces).
class Lexicon {
 public:
  // One entry per distinct unit of a subword- or word-level corpus.
  static Lexicon Build(const std::vector<TokenSequence>& corpus,
                       TokenizationLevel level);

  // "<unit>\t<char> <char> ..." per line.
  static Lexicon Read(std::istream& in);
  void Write(std::ostream& out) const;

  void Add(std::string unit, std::vector<std::string> spelling);

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return entries_;
  }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// Character trie over lexicon spellings. Every node carries the best unigram
// log10 score among the units completed at or below it ("smearing"), which the
// decoder uses as the LM estimate for partially spelled units.
class LexiconTrie {
 public:
  struct Node {
    std::vector<std::pair<std::string, int>> children;  // sorted by character
    std::vector<std::string> units;                     // completed here
    double smear = 0.0;
  };

  static constexpr int kRoot = 0;

  // Throws EmptyCorpus for an empty lexicon and MissingScore naming the first
  // unit without a score.
  static LexiconTrie Build(const Lexicon& lexicon,
                           const std::map<std::string, double>& unigram_scores);

  // Scores every unit with the model's empty-context conditional.
  static LexiconTrie Build(const Lexicon& lexicon, const NGramModel& model);

  const Node& node(int index) const { return nodes_[index]; }
  size_t size() const { return nodes_.size(); }
  std::optional<int> Child(int node, std::string_view character) const;
  std::optional<int> Find(std::span<const std::string> spelling) const;

 private:
  std::vector<Node> nodes_;
};

}  // namespace htrlm

#endif  // HTRLM_LEXICON_H_
