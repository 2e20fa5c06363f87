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

// Greedy and prefix-beam-search decoding of emission matrices, with optional
// n-gram shallow fusion.
//
// A hypothesis is scored as
//
//   ln P_acoustic(labeling) + lm_weight * ln(10) * log10 P_LM(units)
//                           + unit_insertion_score * |units|
//
// where P_acoustic sums over every CTC alignment of the labeling. With a
// character-level LM each emitted character is a unit; with subword or word
// LMs the search follows a lexicon trie and partially spelled units are
// scored with the trie's smeared unigram estimate until they complete.

#ifndef HTRLM_DECODER_H_
#define HTRLM_DECODER_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "htrlm/emissions.h"
#include "htrlm/lexicon.h"
#include "htrlm/ngram.h"
#include "htrlm/tokenizer.h"

namespace htrlm {

struct DecodeConfig {
  size_t beam_size = 25;
  double lm_weight = 1.5;
  double unit_insertion_score = 0.0;
  TokenizationLevel lm_level = TokenizationLevel::kCharacter;
  size_t nbest = 1;
  // Per frame, symbols whose log-prob is more than this below the frame's
  // best symbol are not expanded. Infinite = expand everything.
  double token_beam_threshold = std::numeric_limits<double>::infinity();
  // Hypotheses scoring more than this below the best one are dropped.
  double beam_threshold = std::numeric_limits<double>::infinity();

  // Throws InvalidArgument on beam_size == 0, nbest outside [1, beam_size] or
  // a negative LM weight.
  void Validate() const;
};

// Best LM weights of the grid search: 1.5 for character and subword LMs,
// 0.5 for word LMs.
double DefaultLmWeight(TokenizationLevel level);

// Best orders of the order sweep: 6 for character and subword LMs, 3 for
// word LMs.
int DefaultLmOrder(TokenizationLevel level);

struct Hypothesis {
  std::vector<int> labels;         // emission columns, blanks removed
  std::string text;
  std::vector<std::string> units;  // LM units, in order
  double score = 0.0;              // fused, natural log
  double acoustic = 0.0;           // natural log
  double lm_log10 = 0.0;           // including the end-of-sentence term
};

// Frame-wise argmax, repeats collapsed, blanks removed. Ties pick the lowest
// column. Throws ModeMismatch on seq2seq input.
std::vector<int> GreedyCtc(const EmissionMatrix& emissions);

struct GreedyS2SResult {
  std::vector<int> labels;
  bool reached_eos = false;  // false: no EOS within T frames, all T kept
};

// Frame-wise argmax truncated before the first EOS. Throws ModeMismatch on
// CTC input.
GreedyS2SResult GreedyS2S(const EmissionMatrix& emissions);

// Sum of the frame-wise maxima; the score of the greedy path.
double BestPathScore(const EmissionMatrix& emissions);

// ln of the summed probability of all CTC alignments of `labels`.
double CtcLogLikelihood(const EmissionMatrix& emissions,
                        std::span<const int> labels);

// Reusable decoder for one configuration. Holds only read-only state, so a
// single instance may decode from several threads.
class BeamDecoder {
 public:
  // `lm` may be null (acoustic-only search). `trie` must be given exactly when
  // config.lm_level is kSubword or kWord (MissingTrie /
  // TrieWithoutLexiconLevel). `vocab` is the emission vocabulary; every trie
  // character must be one of its symbols (LexiconMismatch).
  BeamDecoder(const DecodeConfig& config, const NGramModel* lm,
              const LexiconTrie* trie, const std::vector<std::string>& vocab);

  // Ranked (best first), at most config.nbest entries, one per labeling.
  // Throws ModeMismatch for seq2seq matrices and NoCompleteHypothesis when a
  // lexicon-constrained search ends with every hypothesis mid-unit.
  std::vector<Hypothesis> Decode(const EmissionMatrix& emissions) const;

  const DecodeConfig& config() const { return config_; }

 private:
  friend class PrefixSearch;

  struct TrieEdge {
    int column;
    int child;
  };
  struct TrieNodeView {
    std::vector<TrieEdge> edges;  // sorted by column
    std::vector<int> units;       // indices into unit_names_
    bool has_children = false;
    double smear = 0.0;
  };

  DecodeConfig config_;
  const NGramModel* lm_;
  bool lexicon_mode_;
  std::vector<std::string> vocab_;
  std::vector<TokenId> column_units_;     // character mode: column -> LM id
  std::vector<TrieNodeView> trie_nodes_;  // lexicon mode
  std::vector<std::string> unit_names_;
  std::vector<TokenId> unit_ids_;
};

std::vector<Hypothesis> BeamDecode(const EmissionMatrix& emissions,
                                   const DecodeConfig& config,
                                   const NGramModel* lm,
                                   const LexiconTrie* trie);

}  // namespace htrlm

#endif  // HTRLM_DECODER_H_
