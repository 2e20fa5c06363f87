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

#include "htrlm/metrics.h"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "htrlm/tokenizer.h"
#include "json.hpp"

namespace htrlm {
namespace {

using Tokens = std::vector<std::string>;

Tokens Chars(const std::string& s) { return TokenizeChars(s); }

// Memoized recursion over suffixes; independent of the table-filling code.
size_t Levenshtein(const Tokens& a, const Tokens& b) {
  std::map<std::pair<size_t, size_t>, size_t> memo;
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    const size_t best = std::min({go(i + 1, j) + 1, go(i, j + 1) + 1,
                                  go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1)});
    return memo[{i, j}] = best;
  };
  return go(0, 0);
}

Tokens RandomTokens(std::mt19937_64& rng, size_t max_length) {
  Tokens out(rng() % (max_length + 1));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + rng() % 4));
  return out;
}

TEST_CASE("edit distance examples") {
  CHECK(EditDistance(Chars("abc"), Chars("abc")) == EditOps{0, 0, 0, 0});
  CHECK(EditDistance(Chars("abc"), Chars("abd")) == EditOps{1, 1, 0, 0});
  const EditOps words = EditDistance(SplitWhitespace("the cat sat"), SplitWhitespace("the mat"));
  CHECK(words.distance == 2);
  CHECK(words.substitutions == 1);
  CHECK(words.deletions == 1);
  CHECK(words.insertions == 0);
  CHECK(EditDistance(Chars(""), Chars("xy")) == EditOps{2, 0, 2, 0});
  CHECK(EditDistance(Chars("xy"), Chars("")) == EditOps{2, 0, 0, 2});
  CHECK(EditDistance(Chars("é"), Chars("e")).distance == 1);
}

TEST_CASE("edit distance agrees with the recursive oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const Tokens a = RandomTokens(rng, 9);
    const Tokens b = RandomTokens(rng, 9);
    const EditOps ops = EditDistance(a, b);
    CHECK(ops.distance == Levenshtein(a, b));
    CHECK(ops.distance == ops.substitutions + ops.insertions + ops.deletions);
    // Insertions minus deletions is the length difference.
    CHECK(static_cast<long>(ops.insertions) - static_cast<long>(ops.deletions) ==
          static_cast<long>(b.size()) - static_cast<long>(a.size()));
  }
}

TEST_CASE("edit distance is a metric") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const Tokens a = RandomTokens(rng, 8);
    const Tokens b = RandomTokens(rng, 8);
    const Tokens c = RandomTokens(rng, 8);
    const size_t ab = EditDistance(a, b).distance;
    CHECK(ab == EditDistance(b, a).distance);
    CHECK(EditDistance(a, c).distance <= ab + EditDistance(b, c).distance);
    CHECK((ab == 0) == (a == b));
  }
}

TEST_CASE("corpus error rates") {
  SUBCASE("identical pairs") {
    const EvalReport r = Evaluate({{"1", "hello world", "hello world", 0.0},
                                   {"2", "abc", "abc", 0.0}});
    CHECK(r.cer == 0.0);
    CHECK(r.wer == 0.0);
  }
  SUBCASE("total deletion") {
    const EvalReport r = Evaluate({{"1", "ab", "", 0.0}});
    CHECK(r.cer == 1.0);
    CHECK(r.chars.deletions == 2);
  }
  SUBCASE("corpus rates pool distances and lengths") {
    const EvalReport r = Evaluate({{"1", "abcd", "abce", 0.0}, {"2", "abcdef", "abcdf", 0.0}});
    CHECK(r.reference_chars == 10);
    CHECK(r.chars.distance == 2);
    CHECK(r.cer == doctest::Approx(0.2));
  }
  SUBCASE("spaces count as characters") {
    const EvalReport r = Evaluate({{"1", "a b", "ab", 0.0}});
    CHECK(r.reference_chars == 3);
    CHECK(r.chars.deletions == 1);
    CHECK(r.reference_words == 2);
    CHECK(r.words.distance == 2);
  }
  SUBCASE("empty reference") {
    CHECK(ErrorRate(0, 0) == 0.0);
    CHECK(ErrorRate(3, 0) == 3.0);
    CHECK(Evaluate({}).cer == 0.0);
  }
}

TEST_CASE("corpus rates ignore item order") {
  std::mt19937_64 rng(19);
  std::vector<EvalPair> pairs;
  for (int i = 0; i < 30; ++i) {
    Tokens a = RandomTokens(rng, 10);
    Tokens b = RandomTokens(rng, 10);
    std::string ra, hb;
    for (auto& t : a) ra += t;
    for (auto& t : b) hb += t;
    pairs.push_back({std::to_string(i), ra, hb, 0.01 * i});
  }
  const EvalReport forward = Evaluate(pairs);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const EvalReport shuffled = Evaluate(pairs);
  CHECK(forward.cer == shuffled.cer);
  CHECK(forward.wer == shuffled.wer);
  CHECK(forward.mean_seconds == doctest::Approx(shuffled.mean_seconds));
  CHECK(forward.mean_seconds == doctest::Approx(0.145));
}

TEST_CASE("report formatting") {
  const EvalReport r = Evaluate({{"x", "the cat", "the bat", 0.5}});
  const std::string table = r.ToTable();
  CHECK(table.find("CER") != std::string::npos);
  CHECK(table.find("14.29") != std::string::npos);
  CHECK(table.find("50.00") != std::string::npos);
  const auto json = nlohmann::json::parse(r.ToJson());
  CHECK(json["cer_percent"] == "14.29");
  CHECK(json["wer_percent"] == "50.00");
  CHECK(json["items"].size() == 1);
  CHECK(json["items"][0]["chars"]["substitutions"] == 1);
  CHECK(json["mean_seconds"] == 0.5);
}

}  // namespace
}  // namespace htrlm
