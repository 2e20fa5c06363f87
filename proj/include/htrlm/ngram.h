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

// Backoff n-gram language models: counting, smoothing and querying.
//
// Sequences are padded with (order - 1) "<s>" on the left and one "</s>" on
// the right. "<s>" is a context-only symbol: it is never predicted and has no
// probability mass. "<unk>" is always part of the vocabulary; out-of-vocabulary
// query tokens are mapped to it. All scores are log10.

#ifndef HTRLM_NGRAM_H_
#define HTRLM_NGRAM_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "htrlm/tokenizer.h"

namespace htrlm {

using TokenId = std::uint32_t;

inline constexpr int kMaxOrder = 6;
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr TokenId kUnkId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;

class Vocabulary {
 public:
  Vocabulary();

  TokenId Add(std::string_view token);
  // Unknown tokens map to kUnkId.
  TokenId Find(std::string_view token) const;
  std::optional<TokenId> Lookup(std::string_view token) const;
  const std::string& Token(TokenId id) const { return tokens_[id]; }
  size_t size() const { return tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

// Fixed-capacity n-gram key. Unused slots hold kEmptySlot so that keys of
// different lengths never compare equal.
struct NGramKey {
  static constexpr TokenId kEmptySlot = 0xFFFFFFFFu;

  std::array<TokenId, kMaxOrder> ids;
  std::uint8_t length = 0;

  NGramKey() { ids.fill(kEmptySlot); }
  explicit NGramKey(std::span<const TokenId> tokens);

  std::span<const TokenId> view() const { return {ids.data(), length}; }
  TokenId back() const { return ids[length - 1]; }
  NGramKey Context() const;  // drops the last token
  NGramKey Suffix() const;   // drops the first token
  NGramKey Extend(TokenId token) const;

  bool operator==(const NGramKey& other) const = default;
};

struct NGramKeyHash {
  size_t operator()(const NGramKey& key) const noexcept;
};

template <typename Value>
using NGramMap = std::unordered_map<NGramKey, Value, NGramKeyHash>;

// Raw window counts per order (including context-only windows ending in
// "<s>") and, below the top order, Kneser-Ney continuation counts.
class CountTable {
 public:
  // Throws OrderOutOfRange unless 1 <= order <= kMaxOrder, EmptyCorpus when
  // there are no sequences.
  static CountTable Count(const std::vector<TokenSequence>& sequences,
                          int order);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  size_t sequence_count() const { return sequence_count_; }

  // k in [1, order].
  const NGramMap<std::uint64_t>& counts(int k) const { return counts_[k - 1]; }
  // Number of distinct left extensions; k in [1, order - 1].
  const NGramMap<std::uint64_t>& continuation(int k) const {
    return continuation_[k - 1];
  }

  std::uint64_t Count(std::span<const std::string> gram) const;
  std::uint64_t ContinuationCount(std::span<const std::string> gram) const;

 private:
  int order_ = 0;
  size_t sequence_count_ = 0;
  Vocabulary vocab_;
  std::vector<NGramMap<std::uint64_t>> counts_;
  std::vector<NGramMap<std::uint64_t>> continuation_;
};

enum class Smoothing { kNone, kKneserNey, kWittenBell };

std::string_view SmoothingName(Smoothing smoothing);  // none/kneser-ney/witten-bell
Smoothing ParseSmoothing(std::string_view name);

class NGramModel {
 public:
  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;  // true for grams that are contexts
  };

  // tables[k - 1] holds the k-grams. Used by the estimator and the ARPA reader.
  NGramModel(int order, Vocabulary vocab, std::vector<NGramMap<Entry>> tables,
             std::optional<Smoothing> smoothing);

  // Interpolated smoothing converted to backoff form; see ngram.cc.
  static NGramModel Estimate(const CountTable& counts, Smoothing smoothing);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  std::optional<Smoothing> smoothing() const { return smoothing_; }
  const NGramMap<Entry>& table(int k) const { return tables_[k - 1]; }

  // log10 P(token | context) using the longest stored suffix of the context
  // and the usual backoff recursion. Only the last (order - 1) context tokens
  // matter. Predicting "<s>" yields -inf.
  double Conditional(std::span<const TokenId> context, TokenId token) const;
  double Conditional(std::span<const std::string> context,
                     std::string_view token) const;

  // Sum of conditionals over the padded, "</s>"-terminated sequence.
  double ScoreSequence(std::span<const std::string> tokens) const;

  // 10^(-total / events), events = tokens + one "</s>" per sequence.
  double Perplexity(const std::vector<TokenSequence>& corpus) const;

  // Every stored context (grams that carry a backoff weight) plus the empty
  // context.
  std::vector<std::vector<TokenId>> Contexts() const;

  // Tokens a distribution is defined over: the vocabulary without "<s>".
  std::vector<TokenId> PredictableTokens() const;

  // The initial decoding context: (order - 1) copies of "<s>".
  std::vector<TokenId> StartContext() const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<NGramMap<Entry>> tables_;
  std::optional<Smoothing> smoothing_;
};

}  // namespace htrlm

#endif  // HTRLM_NGRAM_H_
