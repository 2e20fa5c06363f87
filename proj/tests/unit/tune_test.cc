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

#include "htrlm/tune.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "htrlm/error.h"
#include "htrlm/metrics.h"
#include "htrlm/simulate.h"
#include "htrlm/tokenizer.h"
#include "json.hpp"
#include "synthetic_text.h"

namespace htrlm {
namespace {

struct Fixture {
  std::vector<TuneItem> items;
  std::map<int, std::unique_ptr<NGramModel>> lms;
  std::map<int, TuneModel> models;

  Fixture(size_t test_lines, double tau, std::vector<int> orders, double margin = 5.0) {
    std::vector<TokenSequence> corpus;
    for (const std::string& line : testing::GenerateLines(600, 1)) {
      corpus.push_back(TokenizeChars(line));
    }
    for (int order : orders) {
      lms[order] = std::make_unique<NGramModel>(
          NGramModel::Estimate(CountTable::Count(corpus, order), Smoothing::kKneserNey));
      models[order] = {lms[order].get(), nullptr};
    }
    const auto lines = testing::GenerateLines(test_lines, 2);
    std::vector<std::string> all = testing::GenerateLines(600, 1);
    all.insert(all.end(), lines.begin(), lines.end());
    const std::vector<std::string> vocab = VocabFromText(all);
    for (size_t i = 0; i < lines.size(); ++i) {
      NoiseModel noise;
      noise.tau = tau;
      noise.margin = margin;
      noise.seed = ItemSeed(99, i);
      items.push_back({Synthesize(lines[i], noise, vocab), lines[i]});
    }
  }
};

TEST_CASE("weight ranges") {
  const auto grid = ParseWeightRange("0:5:0.5");
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 5.0);
  CHECK(grid[3] == 1.5);
  CHECK(ParseWeightRange("0:0.3:0.1").size() == 4);
  CHECK(ParseWeightRange("1.5") == std::vector<double>{1.5});
  CHECK(ParseWeightRange("0,0.25,2") == std::vector<double>{0.0, 0.25, 2.0});
  for (const char* bad : {"", "1:0:0.5", "0:1:0", "0:1", "a,b", "1,,2"}) {
    CHECK_THROWS_AS(ParseWeightRange(bad), Error);
  }
  CHECK(TuneGrid{}.weights.size() == 11);
  CHECK(TuneGrid{}.orders.size() == 6);
}

TEST_CASE("objective names") {
  CHECK(ParseObjective("wer") == Objective::kWer);
  CHECK(ParseObjective("CER") == Objective::kCer);
  CHECK(ObjectiveName(Objective::kCer) == "cer");
  CHECK_THROWS_AS(ParseObjective("bleu"), Error);
}

TEST_CASE("grid validation") {
  TuneGrid grid;
  grid.orders = {7};
  CHECK_THROWS_AS(grid.Validate(), Error);
  grid.orders = {};
  CHECK_THROWS_AS(grid.Validate(), Error);
  grid.orders = {2};
  grid.weights = {-1.0};
  CHECK_THROWS_AS(grid.Validate(), Error);
}

TEST_CASE("single grid point") {
  Fixture f(5, 1.0, {3});
  TuneGrid grid;
  grid.weights = {1.0};
  grid.orders = {3};
  const TuneResult result = Tune(f.items, grid, f.models, {});
  REQUIRE(result.points.size() == 1);
  REQUIRE(result.best);
  CHECK(*result.best == 0);
  CHECK(result.points[0].order == 3);
  CHECK(result.points[0].weight == 1.0);
}

TEST_CASE("surface shape and the weight-zero baseline") {
  Fixture f(12, 1.5, {1, 2, 3});
  TuneGrid grid;
  grid.weights = {0.0, 0.5, 1.0};
  grid.orders = {1, 2, 3};
  grid.objective = Objective::kCer;
  const TuneResult result = Tune(f.items, grid, f.models, {});
  REQUIRE(result.points.size() == 9);
  CHECK(result.points[4].order == 2);
  CHECK(result.points[4].weight == 0.5);

  // Weight zero is the LM-free beam search, whatever the order.
  DecodeSetup baseline;
  baseline.beam = true;
  baseline.config.lm_weight = 0.0;
  std::vector<EvalPair> pairs;
  for (const TuneItem& item : f.items) {
    pairs.push_back({"", item.reference, DecodeMatrix(item.emissions, baseline).text, 0.0});
  }
  const double base_cer = Evaluate(pairs).cer;
  for (size_t o = 0; o < 3; ++o) {
    CHECK(std::abs(result.points[o * 3].cer - base_cer) < 1e-9);
    CHECK(std::abs(result.points[o * 3].wer - result.points[0].wer) < 1e-9);
  }

  const auto json = nlohmann::json::parse(result.ToJson());
  CHECK(json["surface"].size() == 9);
  CHECK(json["objective"] == "cer");
  CHECK(json["best"]["weight"] == result.points[*result.best].weight);
}

TEST_CASE("ties go to the smaller weight, then the smaller order") {
  Fixture f(4, 0.05, {2, 3}, 30.0);
  TuneGrid grid;
  grid.weights = {1.0, 0.0, 0.5};
  grid.orders = {3, 2};
  const TuneResult result = Tune(f.items, grid, f.models, {});
  REQUIRE(result.best);
  for (const TunePoint& p : result.points) REQUIRE(p.objective == 0.0);
  CHECK(result.points[*result.best].weight == 0.0);
  CHECK(result.points[*result.best].order == 2);
}

TEST_CASE("the LM helps on noisy synthetic data") {
  Fixture f(40, 1.5, {6});
  TuneGrid grid;
  grid.weights = {0.0, 0.5, 1.0};
  grid.orders = {6};
  grid.objective = Objective::kCer;
  const TuneResult result = Tune(f.items, grid, f.models, {});
  REQUIRE(result.best);
  const TunePoint& best = result.points[*result.best];
  CHECK(best.weight > 0.0);
  CHECK(best.cer < result.points[0].cer);
}

TEST_CASE("failed points are reported and skipped") {
  Fixture f(3, 1.0, {2});
  TuneGrid grid;
  grid.weights = {0.0, 1.0};
  grid.orders = {2};
  DecodeSetup base;
  base.config.lm_level = TokenizationLevel::kWord;  // no trie: every item fails
  const TuneResult result = Tune(f.items, grid, f.models, base);
  CHECK(result.points[0].failed);
  CHECK(!result.points[0].error.empty());
  CHECK(!result.best);
  CHECK_THROWS_AS(Tune({}, grid, f.models, {}), Error);
  grid.orders = {4};
  CHECK_THROWS_AS(Tune(f.items, grid, f.models, {}), Error);
}

}  // namespace
}  // namespace htrlm
