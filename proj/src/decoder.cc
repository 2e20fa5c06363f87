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

#include "htrlm/decoder.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "htrlm/error.h"

namespace htrlm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLn10 = std::log(10.0);

size_t ArgMax(std::span<const float> row) {
  return static_cast<size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

std::string UnitSymbol(const std::string& symbol) {
  return symbol == " " ? std::string(kSpaceMarker) : symbol;
}

}  // namespace

void DecodeConfig::Validate() const {
  if (beam_size == 0) throw Error(ErrorCode::kInvalidArgument, "beam_size must be >= 1");
  if (nbest == 0 || nbest > beam_size) {
    throw Error(ErrorCode::kInvalidArgument, "nbest must be in [1, beam_size]");
  }
  if (!(lm_weight >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lm_weight must be non-negative");
  }
  if (!(token_beam_threshold >= 0.0) || !(beam_threshold >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beam thresholds must be non-negative");
  }
}

double DefaultLmWeight(TokenizationLevel level) {
  return level == TokenizationLevel::kWord ? 0.5 : 1.5;
}

int DefaultLmOrder(TokenizationLevel level) {
  return level == TokenizationLevel::kWord ? 3 : 6;
}

std::vector<int> GreedyCtc(const EmissionMatrix& emissions) {
  if (emissions.mode() != FrameMode::kCtc) {
    throw Error(ErrorCode::kModeMismatch, "greedy CTC decoding needs a CTC matrix");
  }
  const int blank = static_cast<int>(emissions.special_index());
  std::vector<int> labels;
  int previous = -1;
  for (size_t t = 0; t < emissions.frames(); ++t) {
    const int best = static_cast<int>(ArgMax(emissions.row(t)));
    if (best != previous && best != blank) labels.push_back(best);
    previous = best;
  }
  return labels;
}

GreedyS2SResult GreedyS2S(const EmissionMatrix& emissions) {
  if (emissions.mode() != FrameMode::kS2S) {
    throw Error(ErrorCode::kModeMismatch, "greedy S2S decoding needs a seq2seq matrix");
  }
  GreedyS2SResult result;
  for (size_t t = 0; t < emissions.frames(); ++t) {
    const size_t best = ArgMax(emissions.row(t));
    if (best == emissions.special_index()) {
      result.reached_eos = true;
      break;
    }
    result.labels.push_back(static_cast<int>(best));
  }
  return result;
}

double BestPathScore(const EmissionMatrix& emissions) {
  double total = 0.0;
  for (size_t t = 0; t < emissions.frames(); ++t) {
    const auto row = emissions.row(t);
    total += *std::max_element(row.begin(), row.end());
  }
  return total;
}

double CtcLogLikelihood(const EmissionMatrix& emissions, std::span<const int> labels) {
  if (emissions.mode() != FrameMode::kCtc) {
    throw Error(ErrorCode::kModeMismatch, "CTC scoring needs a CTC matrix");
  }
  const int blank = static_cast<int>(emissions.special_index());
  const size_t frames = emissions.frames();
  if (frames == 0) return labels.empty() ? 0.0 : kNegInf;

  // Extended sequence: blank, l1, blank, l2, ..., blank.
  std::vector<int> ext(2 * labels.size() + 1, blank);
  for (size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  const size_t states = ext.size();

  std::vector<double> alpha(states, kNegInf), next(states);
  alpha[0] = emissions.at(0, ext[0]);
  if (states > 1) alpha[1] = emissions.at(0, ext[1]);
  for (size_t t = 1; t < frames; ++t) {
    for (size_t s = 0; s < states; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = LogAddExp(acc, alpha[s - 1]);
      if (s >= 2 && ext[s] != blank && ext[s] != ext[s - 2]) {
        acc = LogAddExp(acc, alpha[s - 2]);
      }
      next[s] = acc + emissions.at(t, ext[s]);
    }
    alpha.swap(next);
  }
  return states > 1 ? LogAddExp(alpha[states - 1], alpha[states - 2]) : alpha[0];
}

// ---------------------------------------------------------------------------
// Beam decoder setup

BeamDecoder::BeamDecoder(const DecodeConfig& config, const NGramModel* lm,
                         const LexiconTrie* trie, const std::vector<std::string>& vocab)
    : config_(config),
      lm_(lm),
      lexicon_mode_(config.lm_level != TokenizationLevel::kCharacter),
      vocab_(vocab) {
  config_.Validate();
  if (lexicon_mode_ && trie == nullptr) {
    throw Error(ErrorCode::kMissingTrie,
                std::string(LevelName(config.lm_level)) +
                    "-level decoding needs a lexicon trie");
  }
  if (!lexicon_mode_ && trie != nullptr) {
    throw Error(ErrorCode::kTrieWithoutLexiconLevel,
                "a lexicon trie requires a subword or word LM level");
  }

  if (!lexicon_mode_) {
    column_units_.resize(vocab_.size(), kUnkId);
    if (lm_ != nullptr) {
      for (size_t c = 0; c < vocab_.size(); ++c) {
        column_units_[c] = lm_->vocab().Find(UnitSymbol(vocab_[c]));
      }
    }
    return;
  }

  std::unordered_map<std::string, int> columns;
  for (size_t c = 0; c < vocab_.size(); ++c) {
    if (vocab_[c] == kBlankSymbol || vocab_[c] == kEosSymbol) continue;
    columns.emplace(UnitSymbol(vocab_[c]), static_cast<int>(c));
  }
  trie_nodes_.resize(trie->size());
  for (size_t i = 0; i < trie->size(); ++i) {
    const LexiconTrie::Node& node = trie->node(static_cast<int>(i));
    TrieNodeView& view = trie_nodes_[i];
    view.smear = node.smear;
    view.has_children = !node.children.empty();
    for (const auto& [ch, child] : node.children) {
      auto it = columns.find(ch);
      if (it == columns.end()) {
        throw Error(ErrorCode::kLexiconMismatch,
                    "lexicon character '" + ch + "' is not in the emission vocabulary");
      }
      view.edges.push_back({it->second, child});
    }
    std::sort(view.edges.begin(), view.edges.end(),
              [](const TrieEdge& a, const TrieEdge& b) { return a.column < b.column; });
    for (const std::string& unit : node.units) {
      view.units.push_back(static_cast<int>(unit_names_.size()));
      unit_names_.push_back(unit);
      unit_ids_.push_back(lm_ != nullptr ? lm_->vocab().Find(unit) : kUnkId);
    }
  }
}

// ---------------------------------------------------------------------------
// Prefix search state for one matrix.

class PrefixSearch {
 public:
  PrefixSearch(const BeamDecoder& decoder, const EmissionMatrix& emissions)
      : d_(decoder),
        m_(emissions),
        blank_(static_cast<int>(emissions.special_index())),
        use_lm_(decoder.lm_ != nullptr && decoder.config_.lm_weight != 0.0),
        context_length_(decoder.lm_ != nullptr ? decoder.lm_->order() - 1 : 0),
        lm_scale_(decoder.config_.lm_weight * kLn10) {}

  std::vector<Hypothesis> Run();

 private:
  struct Node {
    int parent = -1;
    int label = -1;  // emission column, -1 at the root
    int trie = LexiconTrie::kRoot;
    int unit = -1;   // unit completed by this label, if any
    int units = 0;
    double lm = 0.0;     // log10 of the completed units
    double smear = 0.0;  // log10 estimate for the unit in progress
    std::array<TokenId, kMaxOrder> context{};
    int expansion = -1;  // offset into expansions_
  };

  struct Beam {
    int node;
    double pb;
    double pnb;
    double score;
  };

  std::span<const int> Children(int parent, int column);
  int MakeChild(int parent, int column, int trie, int unit_index);
  void Accumulate(int id, double pb, double pnb);
  double Fused(const Node& node, double pb, double pnb) const;
  std::vector<int> Labels(int id) const;
  bool Better(const Beam& a, const Beam& b) const;

  const BeamDecoder& d_;
  const EmissionMatrix& m_;
  const int blank_;
  const bool use_lm_;
  const int context_length_;
  const double lm_scale_;

  std::vector<Node> nodes_;
  std::vector<int> expansions_;  // per expanded node, one slot per column
  std::vector<int> pool_;        // [count, child ids...] runs

  std::vector<double> acc_pb_, acc_pnb_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t current_stamp_ = 0;
  std::vector<int> touched_;
};

int PrefixSearch::MakeChild(int parent, int column, int trie, int unit_index) {
  Node child;
  const Node& p = nodes_[parent];
  child.parent = parent;
  child.label = column;
  child.trie = trie;
  child.units = p.units;
  child.lm = p.lm;
  child.context = p.context;

  TokenId unit_id = kUnkId;
  bool completes = false;
  if (!d_.lexicon_mode_) {
    unit_id = d_.column_units_[column];
    completes = true;
  } else if (unit_index >= 0) {
    unit_id = d_.unit_ids_[unit_index];
    completes = true;
    child.unit = unit_index;
  } else {
    child.smear = d_.trie_nodes_[trie].smear;
  }
  if (completes) {
    ++child.units;
    if (use_lm_) {
      child.lm += d_.lm_->Conditional(
          std::span<const TokenId>(child.context.data(), context_length_), unit_id);
    }
    if (context_length_ > 0) {
      std::shift_left(child.context.begin(), child.context.begin() + context_length_, 1);
      child.context[context_length_ - 1] = unit_id;
    }
  }
  nodes_.push_back(child);
  return static_cast<int>(nodes_.size() - 1);
}

std::span<const int> PrefixSearch::Children(int parent, int column) {
  if (nodes_[parent].expansion < 0) {
    nodes_[parent].expansion = static_cast<int>(expansions_.size());
    expansions_.resize(expansions_.size() + m_.symbols(), -1);
  }
  const size_t slot_index = nodes_[parent].expansion + column;
  if (expansions_[slot_index] < 0) {
    const int start = static_cast<int>(pool_.size());
    pool_.push_back(0);
    if (!d_.lexicon_mode_) {
      const int child = MakeChild(parent, column, LexiconTrie::kRoot, -1);
      pool_.push_back(child);
    } else {
      const auto& edges = d_.trie_nodes_[nodes_[parent].trie].edges;
      auto edge = std::lower_bound(
          edges.begin(), edges.end(), column,
          [](const BeamDecoder::TrieEdge& e, int c) { return e.column < c; });
      if (edge != edges.end() && edge->column == column) {
        const int target = edge->child;
        const auto& view = d_.trie_nodes_[target];
        if (view.has_children) {
          const int child = MakeChild(parent, column, target, -1);
          pool_.push_back(child);
        }
        for (int unit : view.units) {
          const int child = MakeChild(parent, column, LexiconTrie::kRoot, unit);
          pool_.push_back(child);
        }
      }
    }
    pool_[start] = static_cast<int>(pool_.size()) - start - 1;
    expansions_[slot_index] = start;
  }
  const int start = expansions_[slot_index];
  return {pool_.data() + start + 1, static_cast<size_t>(pool_[start])};
}

void PrefixSearch::Accumulate(int id, double pb, double pnb) {
  if (static_cast<size_t>(id) >= stamp_.size()) {
    const size_t size = std::max(nodes_.size(), static_cast<size_t>(id) + 1);
    acc_pb_.resize(size);
    acc_pnb_.resize(size);
    stamp_.resize(size, 0);
  }
  if (stamp_[id] != current_stamp_) {
    stamp_[id] = current_stamp_;
    acc_pb_[id] = kNegInf;
    acc_pnb_[id] = kNegInf;
    touched_.push_back(id);
  }
  if (pb != kNegInf) acc_pb_[id] = LogAddExp(acc_pb_[id], pb);
  if (pnb != kNegInf) acc_pnb_[id] = LogAddExp(acc_pnb_[id], pnb);
}

double PrefixSearch::Fused(const Node& node, double pb, double pnb) const {
  double score = LogAddExp(pb, pnb);
  if (use_lm_) score += lm_scale_ * (node.lm + node.smear);
  score += d_.config_.unit_insertion_score * node.units;
  return score;
}

std::vector<int> PrefixSearch::Labels(int id) const {
  std::vector<int> labels;
  for (int n = id; n >= 0 && nodes_[n].label >= 0; n = nodes_[n].parent) {
    labels.push_back(nodes_[n].label);
  }
  std::reverse(labels.begin(), labels.end());
  return labels;
}

bool PrefixSearch::Better(const Beam& a, const Beam& b) const {
  if (a.score != b.score) return a.score > b.score;
  if (a.node == b.node) return false;
  const std::vector<int> la = Labels(a.node);
  const std::vector<int> lb = Labels(b.node);
  if (la != lb) return la < lb;
  return a.node < b.node;
}

std::vector<Hypothesis> PrefixSearch::Run() {
  const DecodeConfig& config = d_.config_;
  Node root;
  if (context_length_ > 0) {
    std::fill(root.context.begin(), root.context.begin() + context_length_, kBosId);
  }
  nodes_.push_back(root);
  std::vector<Beam> beam{{0, 0.0, kNegInf, 0.0}};
  std::vector<int> active;
  std::vector<Beam> candidates;
  auto better = [this](const Beam& a, const Beam& b) { return Better(a, b); };

  for (size_t t = 0; t < m_.frames(); ++t) {
    const auto row = m_.row(t);
    active.clear();
    const double floor =
        std::isinf(config.token_beam_threshold)
            ? kNegInf
            : *std::max_element(row.begin(), row.end()) - config.token_beam_threshold;
    for (int c = 0; c < static_cast<int>(row.size()); ++c) {
      if (c != blank_ && row[c] >= floor) active.push_back(c);
    }

    ++current_stamp_;
    touched_.clear();
    for (const Beam& h : beam) {
      const int label = nodes_[h.node].label;
      const double total = LogAddExp(h.pb, h.pnb);
      Accumulate(h.node, total + row[blank_], kNegInf);
      if (label >= 0) Accumulate(h.node, kNegInf, h.pnb + row[label]);
      for (int c : active) {
        const double base = (c == label ? h.pb : total) + row[c];
        if (base == kNegInf) continue;
        for (int child : Children(h.node, c)) Accumulate(child, kNegInf, base);
      }
    }

    candidates.clear();
    for (int id : touched_) {
      candidates.push_back(
          {id, acc_pb_[id], acc_pnb_[id], Fused(nodes_[id], acc_pb_[id], acc_pnb_[id])});
    }
    if (candidates.size() > config.beam_size) {
      std::nth_element(candidates.begin(), candidates.begin() + config.beam_size,
                       candidates.end(), better);
      candidates.resize(config.beam_size);
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (!std::isinf(config.beam_threshold) && !candidates.empty()) {
      const double cutoff = candidates.front().score - config.beam_threshold;
      while (candidates.size() > 1 && candidates.back().score < cutoff) {
        candidates.pop_back();
      }
    }
    beam.swap(candidates);
  }

  // Finalization: end-of-sentence term, complete units only.
  std::vector<Beam> finals;
  std::vector<double> lm_totals(nodes_.size(), 0.0);
  for (const Beam& h : beam) {
    const Node& node = nodes_[h.node];
    if (d_.lexicon_mode_ && node.trie != LexiconTrie::kRoot) continue;
    double lm_total = node.lm;
    if (use_lm_) {
      lm_total += d_.lm_->Conditional(
          std::span<const TokenId>(node.context.data(), context_length_), kEosId);
    }
    lm_totals[h.node] = lm_total;
    double score = LogAddExp(h.pb, h.pnb) + config.unit_insertion_score * node.units;
    if (use_lm_) score += lm_scale_ * lm_total;
    finals.push_back({h.node, h.pb, h.pnb, score});
  }
  if (finals.empty()) {
    throw Error(ErrorCode::kNoCompleteHypothesis,
                "every surviving hypothesis ends inside a lexicon unit");
  }
  std::sort(finals.begin(), finals.end(), better);

  std::vector<Hypothesis> out;
  std::vector<std::vector<int>> emitted;
  for (const Beam& f : finals) {
    if (out.size() >= config.nbest) break;
    std::vector<int> labels = Labels(f.node);
    if (std::find(emitted.begin(), emitted.end(), labels) != emitted.end()) continue;
    emitted.push_back(labels);

    Hypothesis hyp;
    hyp.text = LabelsToText(d_.vocab_, labels);
    if (!d_.lexicon_mode_) {
      for (int label : labels) hyp.units.push_back(UnitSymbol(d_.vocab_[label]));
    } else {
      for (int n = f.node; n > 0; n = nodes_[n].parent) {
        if (nodes_[n].unit >= 0) hyp.units.push_back(d_.unit_names_[nodes_[n].unit]);
      }
      std::reverse(hyp.units.begin(), hyp.units.end());
    }
    hyp.labels = std::move(labels);
    hyp.score = f.score;
    hyp.acoustic = LogAddExp(f.pb, f.pnb);
    hyp.lm_log10 = lm_totals[f.node];
    out.push_back(std::move(hyp));
  }
  return out;
}

std::vector<Hypothesis> BeamDecoder::Decode(const EmissionMatrix& emissions) const {
  if (emissions.mode() != FrameMode::kCtc) {
    throw Error(ErrorCode::kModeMismatch,
                "beam search needs a CTC matrix; adapt seq2seq output first");
  }
  if (emissions.vocab() != vocab_) {
    throw Error(ErrorCode::kShapeMismatch,
                "emission vocabulary differs from the decoder's vocabulary");
  }
  PrefixSearch search(*this, emissions);
  return search.Run();
}

std::vector<Hypothesis> BeamDecode(const EmissionMatrix& emissions,
                                   const DecodeConfig& config, const NGramModel* lm,
                                   const LexiconTrie* trie) {
  if (emissions.mode() != FrameMode::kCtc) {
    throw Error(ErrorCode::kModeMismatch,
                "beam search needs a CTC matrix; adapt seq2seq output first");
  }
  return BeamDecoder(config, lm, trie, emissions.vocab()).Decode(emissions);
}

}  // namespace htrlm
