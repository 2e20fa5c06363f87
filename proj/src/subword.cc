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

#include "htrlm/subword.h"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "htrlm/error.h"
#include "htrlm/unicode.h"

namespace htrlm {
namespace {

constexpr std::string_view kMagic = "bpe-v1";
constexpr size_t kNoRank = std::numeric_limits<size_t>::max();

struct Segment {
  std::vector<std::string> symbols;
  bool mergeable = true;
};

std::vector<Segment> SplitSegments(std::string_view text, SpaceMode mode) {
  std::vector<Segment> segments;
  Segment current;
  auto flush = [&] {
    if (!current.symbols.empty()) segments.push_back(std::move(current));
    current = Segment{};
  };
  const std::string normalized = NormalizeNfc(text);
  for (const Scalar& s : DecodeUtf8(normalized)) {
    if (s.code_point == ' ') {
      flush();
      if (mode == SpaceMode::kSeparateSpaces) {
        segments.push_back({{std::string(kSpaceMarker)}, false});
      } else {
        current.symbols.emplace_back(kSpaceMarker);
      }
    } else if (IsWhitespaceCodePoint(s.code_point)) {
      flush();
      segments.push_back({{std::string(s.bytes)}, false});
    } else {
      current.symbols.emplace_back(s.bytes);
    }
  }
  flush();
  return segments;
}

std::string RankKey(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back('\t');
  key.append(right);
  return key;
}

// Merges every non-overlapping (left, right) occurrence, scanning left to right.
bool MergePair(std::vector<std::string>& symbols, const std::string& left,
               const std::string& right) {
  bool changed = false;
  size_t out = 0;
  for (size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
      symbols[out++] = left + right;
      ++i;
      changed = true;
    } else {
      if (out != i) symbols[out] = std::move(symbols[i]);
      ++out;
    }
  }
  symbols.resize(out);
  return changed;
}

}  // namespace

std::string_view SpaceModeName(SpaceMode mode) {
  return mode == SpaceMode::kSentencePiece ? "sentencepiece" : "separate-spaces";
}

SpaceMode ParseSpaceMode(std::string_view name) {
  if (name == "sentencepiece") return SpaceMode::kSentencePiece;
  if (name == "separate-spaces") return SpaceMode::kSeparateSpaces;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown space mode '" + std::string(name) + "'");
}

SubwordModel::SubwordModel(std::vector<MergeRule> merges,
                           std::vector<std::string> vocab,
                           size_t vocab_size_target, SpaceMode space_mode)
    : merges_(std::move(merges)),
      vocab_(std::move(vocab)),
      vocab_set_(vocab_.begin(), vocab_.end()),
      vocab_size_target_(vocab_size_target),
      space_mode_(space_mode) {
  for (size_t rank = 0; rank < merges_.size(); ++rank) {
    ranks_[RankKey(merges_[rank].first, merges_[rank].second)].push_back(rank);
  }
}

SubwordModel SubwordModel::Train(const std::vector<std::string>& corpus,
                                 size_t vocab_size, SpaceMode space_mode) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "subword training corpus is empty");
  }
  if (vocab_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "vocab_size must be positive");
  }
  std::map<std::vector<std::string>, std::uint64_t> word_counts;
  std::set<std::string> characters;
  for (const std::string& line : corpus) {
    for (Segment& seg : SplitSegments(line, space_mode)) {
      characters.insert(seg.symbols.begin(), seg.symbols.end());
      if (seg.mergeable) ++word_counts[std::move(seg.symbols)];
    }
  }
  if (vocab_size < characters.size()) {
    throw Error(ErrorCode::kVocabTooSmall,
                "vocab_size " + std::to_string(vocab_size) + " is below the " +
                    std::to_string(characters.size()) +
                    " distinct characters of the corpus");
  }

  std::vector<std::string> vocab(characters.begin(), characters.end());
  std::unordered_set<std::string> in_vocab(vocab.begin(), vocab.end());
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words(
      word_counts.begin(), word_counts.end());
  std::vector<MergeRule> merges;

  while (vocab.size() < vocab_size) {
    std::map<MergeRule, std::uint64_t> pair_counts;
    for (const auto& [symbols, count] : words) {
      for (size_t i = 0; i + 1 < symbols.size(); ++i) {
        pair_counts[{symbols[i], symbols[i + 1]}] += count;
      }
    }
    if (pair_counts.empty()) break;
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    auto best = pair_counts.begin();
    for (auto it = pair_counts.begin(); it != pair_counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const MergeRule rule = best->first;
    for (auto& word : words) MergePair(word.first, rule.first, rule.second);
    merges.push_back(rule);
    std::string merged = rule.first + rule.second;
    if (in_vocab.insert(merged).second) vocab.push_back(std::move(merged));
  }
  return SubwordModel(std::move(merges), std::move(vocab), vocab_size,
                      space_mode);
}

bool SubwordModel::Contains(std::string_view unit) const {
  return vocab_set_.count(std::string(unit)) > 0;
}

void SubwordModel::ApplyMerges(std::vector<std::string>& symbols) const {
  size_t last_rank = kNoRank;
  while (symbols.size() > 1) {
    size_t best_rank = kNoRank;
    size_t best_pos = 0;
    for (size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = ranks_.find(RankKey(symbols[i], symbols[i + 1]));
      if (it == ranks_.end()) continue;
      // First rank strictly after the last applied one.
      auto r = last_rank == kNoRank
                   ? it->second.begin()
                   : std::upper_bound(it->second.begin(), it->second.end(),
                                      last_rank);
      if (r != it->second.end() && *r < best_rank) {
        best_rank = *r;
        best_pos = i;
      }
    }
    if (best_rank == kNoRank) break;
    const std::string left = symbols[best_pos];
    const std::string right = symbols[best_pos + 1];
    MergePair(symbols, left, right);
    last_rank = best_rank;
  }
}

TokenSequence SubwordModel::Tokenize(std::string_view text) const {
  TokenSequence tokens;
  for (Segment& seg : SplitSegments(text, space_mode_)) {
    if (seg.mergeable) ApplyMerges(seg.symbols);
    for (std::string& symbol : seg.symbols) tokens.push_back(std::move(symbol));
  }
  return tokens;
}

void SubwordModel::Write(std::ostream& out) const {
  out << kMagic << ' ' << vocab_size_target_ << ' '
      << SpaceModeName(space_mode_) << '\n';
  for (const auto& [left, right] : merges_) out << left << '\t' << right << '\n';
  out << '\n';
  for (const std::string& unit : vocab_) out << unit << '\n';
}

SubwordModel SubwordModel::Read(std::istream& in) {
  auto fail = [](size_t line_no, const std::string& what) {
    return Error(ErrorCode::kMalformedModel,
                 "line " + std::to_string(line_no) + ": " + what);
  };
  std::string line;
  size_t line_no = 1;
  if (!std::getline(in, line)) throw fail(line_no, "missing header");
  std::istringstream header(line);
  std::string magic, mode_name;
  long long target = 0;
  if (!(header >> magic >> target >> mode_name) || magic != kMagic ||
      target <= 0) {
    throw fail(line_no, "expected 'bpe-v1 <vocab_size> <space_mode>'");
  }
  SpaceMode mode;
  try {
    mode = ParseSpaceMode(mode_name);
  } catch (const Error&) {
    throw fail(line_no, "unknown space mode '" + mode_name + "'");
  }

  std::vector<MergeRule> merges;
  bool saw_separator = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      saw_separator = true;
      break;
    }
    const size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw fail(line_no, "expected '<left>\\t<right>'");
    }
    merges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  if (!saw_separator) throw fail(line_no, "missing blank line before vocab");

  std::vector<std::string> vocab;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) throw fail(line_no, "empty vocab entry");
    if (!seen.insert(line).second) throw fail(line_no, "duplicate vocab entry");
    vocab.push_back(line);
  }
  for (const auto& [left, right] : merges) {
    if (!seen.count(left + right)) {
      throw Error(ErrorCode::kMalformedModel,
                  "merge output '" + left + right + "' missing from vocab");
    }
  }
  return SubwordModel(std::move(merges), std::move(vocab),
                      static_cast<size_t>(target), mode);
}

}  // namespace htrlm
