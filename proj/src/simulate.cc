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

#include "htrlm/simulate.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "htrlm/error.h"
#include "htrlm/tokenizer.h"

namespace htrlm {

void NoiseModel::Validate() const {
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
  if (!(margin > 0.0)) throw Error(ErrorCode::kInvalidArgument, "margin must be positive");
  if (!(blank_affinity >= 0.0 && blank_affinity < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "blank affinity must lie in [0, 1)");
  }
  if (frames_per_char == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frames per character must be >= 1");
  }
}

uint64_t ItemSeed(uint64_t seed, size_t index) {
  // splitmix64 finalizer over seed and index.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> VocabFromText(const std::vector<std::string>& lines) {
  std::set<std::string> symbols;
  for (const std::string& line : lines) {
    for (std::string& token : TokenizeChars(line)) symbols.insert(std::move(token));
  }
  std::vector<std::string> vocab{std::string(kBlankSymbol)};
  vocab.insert(vocab.end(), symbols.begin(), symbols.end());
  return vocab;
}

EmissionMatrix Synthesize(std::string_view text, const NoiseModel& noise,
                          const std::vector<std::string>& vocab) {
  noise.Validate();
  const auto blank_it = std::find(vocab.begin(), vocab.end(), kBlankSymbol);
  if (blank_it == vocab.end()) {
    throw Error(ErrorCode::kModeMismatch, "simulation vocabulary needs \"<ctc>\"");
  }
  const size_t blank = static_cast<size_t>(blank_it - vocab.begin());
  const size_t columns = vocab.size();

  std::unordered_map<std::string, size_t> index;
  for (size_t c = 0; c < columns; ++c) {
    index.emplace(vocab[c] == " " ? std::string(kSpaceMarker) : vocab[c], c);
  }
  std::vector<size_t> targets;
  for (const std::string& ch : TokenizeChars(text)) {
    auto it = index.find(ch);
    if (it == index.end()) {
      const std::string shown = ch == kSpaceMarker ? std::string(" ") : ch;
      throw Error(ErrorCode::kUnknownCharacter,
                  "character '" + shown + "' is not in the vocabulary");
    }
    targets.push_back(it->second);
  }

  // Neighborhood masks per target column; empty = every column.
  std::vector<std::vector<bool>> masks(columns);
  for (const auto& [symbol, neighbors] : noise.neighborhood) {
    auto self = index.find(symbol == " " ? std::string(kSpaceMarker) : symbol);
    if (self == index.end()) continue;
    std::vector<bool> mask(columns, false);
    mask[self->second] = true;
    mask[blank] = true;
    for (const std::string& n : neighbors) {
      auto it = index.find(n == " " ? std::string(kSpaceMarker) : n);
      if (it != index.end()) mask[it->second] = true;
    }
    masks[self->second] = std::move(mask);
  }

  const size_t frames = targets.size() * (noise.frames_per_char + 1);
  std::vector<float> data(frames * columns);
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> logits(columns);

  size_t t = 0;
  auto emit = [&](size_t target, bool character) {
    const std::vector<bool>& mask = masks[target];
    for (size_t c = 0; c < columns; ++c) {
      if (!mask.empty() && !mask[c]) {
        logits[c] = -noise.margin;
        continue;
      }
      logits[c] = noise.tau * normal(rng) + (c == target ? noise.margin : 0.0);
    }
    if (character) logits[blank] += noise.blank_affinity * noise.margin;
    const double max = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - max);
    const double log_norm = max + std::log(sum);
    float* row = data.data() + t * columns;
    for (size_t c = 0; c < columns; ++c) row[c] = static_cast<float>(logits[c] - log_norm);
    ++t;
  };
  for (size_t target : targets) {
    for (size_t f = 0; f < noise.frames_per_char; ++f) emit(target, true);
    emit(blank, false);
  }
  return EmissionMatrix(std::move(data), frames, vocab);
}

}  // namespace htrlm
