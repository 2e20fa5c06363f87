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

#include "htrlm/lexicon.h"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "htrlm/error.h"

namespace htrlm {

Lexicon Lexicon::Build(const std::vector<TokenSequence>& corpus,
                       TokenizationLevel level) {
  if (level == TokenizationLevel::kCharacter) {
    throw Error(ErrorCode::kInvalidArgument,
                "character-level decoding does not use a lexicon");
  }
  Lexicon lexicon;
  for (const TokenSequence& sequence : corpus) {
    for (const std::string& unit : sequence) {
      if (lexicon.entries_.count(unit)) continue;
      lexicon.Add(unit, TokenizeChars(unit));
    }
  }
  if (lexicon.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no units to build a lexicon from");
  }
  return lexicon;
}

void Lexicon::Add(std::string unit, std::vector<std::string> spelling) {
  if (unit.empty() || spelling.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty lexicon unit or spelling");
  }
  entries_.insert_or_assign(std::move(unit), std::move(spelling));
}

void Lexicon::Write(std::ostream& out) const {
  for (const auto& [unit, spelling] : entries_) {
    out << unit << '\t';
    for (size_t i = 0; i < spelling.size(); ++i) {
      if (i) out << ' ';
      out << spelling[i];
    }
    out << '\n';
  }
}

Lexicon Lexicon::Read(std::istream& in) {
  Lexicon lexicon;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error(ErrorCode::kMalformedModel,
                  "lexicon line " + std::to_string(line_no) +
                      ": expected '<unit>\\t<char> <char> ...'");
    }
    std::string unit = line.substr(0, tab);
    std::vector<std::string> spelling;
    size_t pos = tab + 1;
    while (pos <= line.size()) {
      size_t next = line.find(' ', pos);
      if (next == std::string::npos) next = line.size();
      if (next > pos) spelling.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    if (lexicon.entries_.count(unit)) {
      throw Error(ErrorCode::kMalformedModel,
                  "lexicon line " + std::to_string(line_no) +
                      ": duplicate unit '" + unit + "'");
    }
    lexicon.Add(std::move(unit), std::move(spelling));
  }
  return lexicon;
}

LexiconTrie LexiconTrie::Build(const Lexicon& lexicon,
                               const std::map<std::string, double>& unigram_scores) {
  if (lexicon.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot build a trie from an empty lexicon");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  LexiconTrie trie;
  trie.nodes_.emplace_back();
  trie.nodes_[kRoot].smear = kNegInf;

  for (const auto& [unit, spelling] : lexicon.entries()) {
    auto score = unigram_scores.find(unit);
    if (score == unigram_scores.end()) {
      throw Error(ErrorCode::kMissingScore, "no unigram score for unit '" + unit + "'");
    }
    int node = kRoot;
    trie.nodes_[node].smear = std::max(trie.nodes_[node].smear, score->second);
    for (const std::string& ch : spelling) {
      auto& children = trie.nodes_[node].children;
      auto it = std::lower_bound(
          children.begin(), children.end(), ch,
          [](const auto& child, const std::string& key) { return child.first < key; });
      int next;
      if (it != children.end() && it->first == ch) {
        next = it->second;
      } else {
        next = static_cast<int>(trie.nodes_.size());
        children.insert(it, {ch, next});
        trie.nodes_.emplace_back();
        trie.nodes_[next].smear = kNegInf;
      }
      node = next;
      trie.nodes_[node].smear = std::max(trie.nodes_[node].smear, score->second);
    }
    trie.nodes_[node].units.push_back(unit);
  }
  return trie;
}

LexiconTrie LexiconTrie::Build(const Lexicon& lexicon, const NGramModel& model) {
  std::map<std::string, double> scores;
  const std::vector<TokenId> empty;
  for (const auto& [unit, spelling] : lexicon.entries()) {
    scores[unit] = model.Conditional(empty, model.vocab().Find(unit));
  }
  return Build(lexicon, scores);
}

std::optional<int> LexiconTrie::Child(int node, std::string_view character) const {
  const auto& children = nodes_[node].children;
  auto it = std::lower_bound(
      children.begin(), children.end(), character,
      [](const auto& child, std::string_view key) { return child.first < key; });
  if (it == children.end() || it->first != character) return std::nullopt;
  return it->second;
}

std::optional<int> LexiconTrie::Find(std::span<const std::string> spelling) const {
  int node = kRoot;
  for (const std::string& ch : spelling) {
    auto next = Child(node, ch);
    if (!next) return std::nullopt;
    node = *next;
  }
  return node;
}

}  // namespace htrlm
