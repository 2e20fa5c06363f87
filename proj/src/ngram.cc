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

#include "htrlm/ngram.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "htrlm/error.h"

namespace htrlm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double Log10OrNegInf(double p) { return p > 0.0 ? std::log10(p) : kNegInf; }

}  // namespace

Vocabulary::Vocabulary() {
  Add(kUnkToken);
  Add(kBosToken);
  Add(kEosToken);
}

TokenId Vocabulary::Add(std::string_view token) {
  auto [it, inserted] =
      ids_.try_emplace(std::string(token), static_cast<TokenId>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

TokenId Vocabulary::Find(std::string_view token) const {
  return Lookup(token).value_or(kUnkId);
}

std::optional<TokenId> Vocabulary::Lookup(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

NGramKey::NGramKey(std::span<const TokenId> tokens) : NGramKey() {
  length = static_cast<std::uint8_t>(tokens.size());
  std::copy(tokens.begin(), tokens.end(), ids.begin());
}

NGramKey NGramKey::Context() const {
  NGramKey key = *this;
  key.ids[length - 1] = kEmptySlot;
  --key.length;
  return key;
}

NGramKey NGramKey::Suffix() const {
  return NGramKey(view().subspan(1));
}

NGramKey NGramKey::Extend(TokenId token) const {
  NGramKey key = *this;
  key.ids[key.length++] = token;
  return key;
}

size_t NGramKeyHash::operator()(const NGramKey& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ key.length;
  for (TokenId id : key.ids) {
    h ^= id;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<size_t>(h);
}

// ---------------------------------------------------------------------------
// Counting

CountTable CountTable::Count(const std::vector<TokenSequence>& sequences,
                             int order) {
  if (order < 1 || order > kMaxOrder) {
    throw Error(ErrorCode::kOrderOutOfRange,
                "order " + std::to_string(order) + " outside supported range 1-" +
                    std::to_string(kMaxOrder));
  }
  if (sequences.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no training sequences");
  }
  CountTable table;
  table.order_ = order;
  table.sequence_count_ = sequences.size();
  table.counts_.resize(order);
  table.continuation_.resize(order - 1);

  std::vector<TokenId> padded;
  for (const TokenSequence& sequence : sequences) {
    padded.assign(order - 1, kBosId);
    for (const std::string& token : sequence) {
      if (token == kBosToken || token == kEosToken) {
        throw Error(ErrorCode::kInvalidArgument,
                    "training data may not contain sentence markers");
      }
      padded.push_back(table.vocab_.Add(token));
    }
    padded.push_back(kEosId);
    for (size_t end = 1; end <= padded.size(); ++end) {
      const size_t max_k = std::min<size_t>(order, end);
      for (size_t k = 1; k <= max_k; ++k) {
        const std::span<const TokenId> window(padded.data() + end - k, k);
        ++table.counts_[k - 1][NGramKey(window)];
      }
    }
  }

  for (int k = 1; k < order; ++k) {
    for (const auto& [gram, count] : table.counts_[k]) {
      ++table.continuation_[k - 1][gram.Suffix()];
    }
  }
  return table;
}

namespace {

std::optional<NGramKey> KeyFor(const Vocabulary& vocab,
                               std::span<const std::string> gram) {
  if (gram.empty() || gram.size() > static_cast<size_t>(kMaxOrder)) {
    return std::nullopt;
  }
  std::vector<TokenId> ids;
  for (const std::string& token : gram) {
    auto id = vocab.Lookup(token);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  return NGramKey(ids);
}

}  // namespace

std::uint64_t CountTable::Count(std::span<const std::string> gram) const {
  if (gram.empty() || gram.size() > static_cast<size_t>(order_)) return 0;
  auto key = KeyFor(vocab_, gram);
  if (!key) return 0;
  const auto& table = counts_[gram.size() - 1];
  auto it = table.find(*key);
  return it == table.end() ? 0 : it->second;
}

std::uint64_t CountTable::ContinuationCount(
    std::span<const std::string> gram) const {
  if (gram.empty() || gram.size() >= static_cast<size_t>(order_)) return 0;
  auto key = KeyFor(vocab_, gram);
  if (!key) return 0;
  const auto& table = continuation_[gram.size() - 1];
  auto it = table.find(*key);
  return it == table.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Estimation

std::string_view SmoothingName(Smoothing smoothing) {
  switch (smoothing) {
    case Smoothing::kNone: return "none";
    case Smoothing::kKneserNey: return "kneser-ney";
    case Smoothing::kWittenBell: return "witten-bell";
  }
  return "none";
}

Smoothing ParseSmoothing(std::string_view name) {
  if (name == "none") return Smoothing::kNone;
  if (name == "kneser-ney") return Smoothing::kKneserNey;
  if (name == "witten-bell") return Smoothing::kWittenBell;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown smoothing '" + std::string(name) + "'");
}

NGramModel::NGramModel(int order, Vocabulary vocab,
                       std::vector<NGramMap<Entry>> tables,
                       std::optional<Smoothing> smoothing)
    : order_(order),
      vocab_(std::move(vocab)),
      tables_(std::move(tables)),
      smoothing_(smoothing) {
  if (order_ < 1 || order_ > kMaxOrder ||
      tables_.size() != static_cast<size_t>(order_)) {
    throw Error(ErrorCode::kOrderOutOfRange,
                "model order " + std::to_string(order_) + " outside 1-" +
                    std::to_string(kMaxOrder));
  }
}

// Every level k interpolates its own estimate with level k - 1:
//
//   KN:   P_k(w|h) = (a(hw) - D_k) / a(h.) + D_k N1+(h.) / a(h.) * P_{k-1}(w|h')
//   WB:   P_k(w|h) = (c(hw) + T(h) P_{k-1}(w|h')) / (c(h.) + T(h))
//   None: P_k(w|h) = c(hw) / c(h.)
//
// where a = raw counts at the top order and continuation counts below it (KN),
// D_k = n1 / (n1 + 2 n2) from the level's count-of-counts (0.75 if either is
// zero) and P_0 is uniform over the predictable tokens. Since every stored
// gram has a(hw) >= 1 > D_k, an unseen w under h gets exactly
// gamma(h) P_{k-1}(w|h'), so the backoff weight of h is gamma(h) and the
// stored probabilities are the interpolated ones.
NGramModel NGramModel::Estimate(const CountTable& counts, Smoothing smoothing) {
  const int order = counts.order();
  const Vocabulary& vocab = counts.vocab();
  const double uniform = 1.0 / static_cast<double>(vocab.size() - 1);
  std::vector<NGramMap<Entry>> tables(order);

  struct ContextStats {
    std::uint64_t total = 0;
    std::uint64_t types = 0;
  };

  for (int k = 1; k <= order; ++k) {
    const bool continuation = smoothing == Smoothing::kKneserNey && k < order;
    const NGramMap<std::uint64_t>& level =
        continuation ? counts.continuation(k) : counts.counts(k);

    NGramMap<ContextStats> contexts;
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [gram, value] : level) {
      if (gram.back() == kBosId) continue;
      ContextStats& stats = contexts[gram.Context()];
      stats.total += value;
      ++stats.types;
      if (value == 1) ++n1;
      if (value == 2) ++n2;
    }

    double discount = 0.0;
    if (smoothing == Smoothing::kKneserNey) {
      discount = (n1 > 0 && n2 > 0)
                     ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2)
                     : 0.75;
      if (!(discount > 0.0 && discount < 1.0)) {
        throw Error(ErrorCode::kDegenerateCounts,
                    "Kneser-Ney discount undefined at order " + std::to_string(k));
      }
    }
    auto gamma = [&](const ContextStats& s) {
      const double total = static_cast<double>(s.total);
      const double types = static_cast<double>(s.types);
      switch (smoothing) {
        case Smoothing::kKneserNey: return discount * types / total;
        case Smoothing::kWittenBell: return types / (total + types);
        case Smoothing::kNone: return 0.0;
      }
      return 0.0;
    };

    NGramMap<Entry>& table = tables[k - 1];
    for (const auto& [gram, raw] : counts.counts(k)) {
      Entry entry;
      if (gram.back() == kBosId) {
        entry.log10_prob = kNegInf;
        table.emplace(gram, entry);
        continue;
      }
      const double value = static_cast<double>(continuation ? level.at(gram) : raw);
      const ContextStats& stats = contexts.at(gram.Context());
      const double total = static_cast<double>(stats.total);
      const double lower =
          k == 1 ? uniform : std::pow(10.0, tables[k - 2].at(gram.Suffix()).log10_prob);
      double p = 0.0;
      switch (smoothing) {
        case Smoothing::kKneserNey:
          p = (value - discount) / total + gamma(stats) * lower;
          break;
        case Smoothing::kWittenBell:
          p = (value + static_cast<double>(stats.types) * lower) /
              (total + static_cast<double>(stats.types));
          break;
        case Smoothing::kNone:
          p = value / total;
          break;
      }
      entry.log10_prob = Log10OrNegInf(p);
      table.emplace(gram, entry);
    }

    if (k == 1) {
      const double empty_gamma = gamma(contexts.at(NGramKey()));
      for (TokenId id = 0; id < vocab.size(); ++id) {
        const NGramKey key(std::span<const TokenId>(&id, 1));
        if (table.count(key)) continue;
        Entry entry;
        entry.log10_prob = id == kBosId ? kNegInf : Log10OrNegInf(empty_gamma * uniform);
        table.emplace(key, entry);
      }
    } else {
      for (const auto& [context, stats] : contexts) {
        Entry& entry = tables[k - 2].at(context);
        entry.has_backoff = true;
        entry.log10_backoff = Log10OrNegInf(gamma(stats));
      }
    }
  }
  return NGramModel(order, vocab, std::move(tables), smoothing);
}

// ---------------------------------------------------------------------------
// Queries

double NGramModel::Conditional(std::span<const TokenId> context,
                               TokenId token) const {
  if (token == kBosId) return kNegInf;
  if (token >= vocab_.size()) token = kUnkId;
  const size_t length = std::min(context.size(), static_cast<size_t>(order_ - 1));
  const std::span<const TokenId> history = context.last(length);

  double backoff = 0.0;
  for (size_t l = length;; --l) {
    const NGramKey ctx(history.last(l));
    auto hit = tables_[l].find(ctx.Extend(token));
    if (hit != tables_[l].end()) return backoff + hit->second.log10_prob;
    if (l == 0) return kNegInf;
    auto ctx_entry = tables_[l - 1].find(ctx);
    if (ctx_entry != tables_[l - 1].end() && ctx_entry->second.has_backoff) {
      backoff += ctx_entry->second.log10_backoff;
    }
  }
}

double NGramModel::Conditional(std::span<const std::string> context,
                               std::string_view token) const {
  std::vector<TokenId> ids;
  ids.reserve(context.size());
  for (const std::string& t : context) ids.push_back(vocab_.Find(t));
  return Conditional(ids, vocab_.Find(token));
}

std::vector<TokenId> NGramModel::StartContext() const {
  return std::vector<TokenId>(order_ - 1, kBosId);
}

double NGramModel::ScoreSequence(std::span<const std::string> tokens) const {
  std::vector<TokenId> history = StartContext();
  double total = 0.0;
  for (const std::string& token : tokens) {
    const TokenId id = vocab_.Find(token);
    total += Conditional(history, id);
    history.push_back(id);
  }
  return total + Conditional(history, kEosId);
}

double NGramModel::Perplexity(const std::vector<TokenSequence>& corpus) const {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "perplexity of an empty corpus");
  }
  double total = 0.0;
  size_t events = 0;
  for (const TokenSequence& sequence : corpus) {
    total += ScoreSequence(sequence);
    events += sequence.size() + 1;
  }
  return std::pow(10.0, -total / static_cast<double>(events));
}

std::vector<std::vector<TokenId>> NGramModel::Contexts() const {
  std::vector<std::vector<TokenId>> out;
  out.emplace_back();
  for (const auto& table : tables_) {
    for (const auto& [gram, entry] : table) {
      if (entry.has_backoff) {
        out.emplace_back(gram.view().begin(), gram.view().end());
      }
    }
  }
  return out;
}

std::vector<TokenId> NGramModel::PredictableTokens() const {
  std::vector<TokenId> out;
  for (TokenId id = 0; id < vocab_.size(); ++id) {
    if (id != kBosId) out.push_back(id);
  }
  return out;
}

}  // namespace htrlm
