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

#include "kn_oracle.h"

#include <algorithm>
#include <map>
#include <set>

namespace htrlm::oracle {

KneserNeyOracle::KneserNeyOracle(const std::vector<std::vector<std::string>>& corpus,
                                 int order)
    : order_(order) {
  std::set<std::string> tokens{"</s>", "<unk>"};
  for (const auto& sentence : corpus) {
    Gram padded(order - 1, "<s>");
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    padded.push_back("</s>");
    padded_.push_back(padded);
    tokens.insert(sentence.begin(), sentence.end());
  }
  predictable_.assign(tokens.begin(), tokens.end());
  for (int k = 1; k <= order; ++k) discounts_.push_back(Discount(k));
}

long KneserNeyOracle::Count(const Gram& g) const {
  long total = 0;
  for (const Gram& s : padded_) {
    for (size_t i = 0; i + g.size() <= s.size(); ++i) {
      if (std::equal(g.begin(), g.end(), s.begin() + i)) ++total;
    }
  }
  return total;
}

long KneserNeyOracle::LeftExtensions(const Gram& g) const {
  std::set<std::string> left;
  for (const Gram& s : padded_) {
    for (size_t i = 1; i + g.size() <= s.size(); ++i) {
      if (std::equal(g.begin(), g.end(), s.begin() + i)) left.insert(s[i - 1]);
    }
  }
  return static_cast<long>(left.size());
}

long KneserNeyOracle::Value(const Gram& g) const {
  return static_cast<int>(g.size()) == order_ ? Count(g) : LeftExtensions(g);
}

double KneserNeyOracle::Discount(int k) const {
  // Count-of-counts over every k-gram that predicts a real token.
  std::set<Gram> grams;
  for (const Gram& s : padded_) {
    for (size_t i = 0; i + k <= s.size(); ++i) {
      Gram g(s.begin() + i, s.begin() + i + k);
      if (g.back() != "<s>") grams.insert(g);
    }
  }
  long n1 = 0, n2 = 0;
  for (const Gram& g : grams) {
    const long v = Value(g);
    n1 += v == 1;
    n2 += v == 2;
  }
  if (n1 == 0 || n2 == 0) return 0.75;
  return static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
}

double KneserNeyOracle::Level(const Gram& history, const std::string& word) const {
  const double lower =
      history.empty() ? 1.0 / static_cast<double>(predictable_.size())
                      : Level(Gram(history.begin() + 1, history.end()), word);
  long denominator = 0, types = 0;
  for (const std::string& w : predictable_) {
    Gram g = history;
    g.push_back(w);
    const long v = Value(g);
    denominator += v;
    types += v > 0;
  }
  if (denominator == 0) return lower;
  Gram g = history;
  g.push_back(word);
  const double d = discounts_[history.size()];
  const double value = static_cast<double>(Value(g));
  return std::max(value - d, 0.0) / denominator + d * types / denominator * lower;
}

double KneserNeyOracle::Probability(const std::vector<std::string>& history,
                                    const std::string& word) const {
  if (word == "<s>") return 0.0;
  if (std::find(predictable_.begin(), predictable_.end(), word) == predictable_.end()) {
    return Probability(history, "<unk>");
  }
  const Gram context(history.end() - (order_ - 1), history.end());
  return Level(context, word);
}

}  // namespace htrlm::oracle
