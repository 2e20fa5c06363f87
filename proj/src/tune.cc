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

#include <cmath>
#include <cstdlib>

#include "htrlm/error.h"
#include "htrlm/metrics.h"
#include "json.hpp"

namespace htrlm {
namespace {

double ParseNumber(std::string_view text) {
  const std::string copy(text);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "bad number '" + copy + "'");
  }
  return value;
}

}  // namespace

std::string_view ObjectiveName(Objective objective) {
  return objective == Objective::kWer ? "wer" : "cer";
}

Objective ParseObjective(std::string_view name) {
  if (name == "wer" || name == "WER") return Objective::kWer;
  if (name == "cer" || name == "CER") return Objective::kCer;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown objective '" + std::string(name) + "' (expected wer or cer)");
}

std::vector<double> ParseWeightRange(std::string_view text) {
  std::vector<double> weights;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    size_t pos = 0;
    while (true) {
      const size_t colon = text.find(':', pos);
      parts.push_back(ParseNumber(text.substr(pos, colon - pos)));
      if (colon == std::string_view::npos) break;
      pos = colon + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "weight range must be start:stop:step with step > 0 and stop >= start");
    }
    // Index-based steps avoid accumulating rounding error.
    const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= steps; ++i) weights.push_back(parts[0] + parts[2] * i);
    return weights;
  }
  size_t pos = 0;
  while (true) {
    const size_t comma = text.find(',', pos);
    weights.push_back(ParseNumber(text.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return weights;
}

void TuneGrid::Validate() const {
  if (weights.empty() || orders.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tuning grid axes must be non-empty");
  }
  for (double weight : weights) {
    if (!(weight >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "LM weights must be non-negative");
    }
  }
  for (int order : orders) {
    if (order < 1 || order > kMaxOrder) {
      throw Error(ErrorCode::kOrderOutOfRange, "grid order " + std::to_string(order) +
                                                   " outside the supported range 1-6");
    }
  }
}

TuneResult Tune(const std::vector<TuneItem>& items, const TuneGrid& grid,
                const std::map<int, TuneModel>& models, const DecodeSetup& base,
                size_t threads) {
  grid.Validate();
  if (items.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "the validation set is empty");
  }
  for (int order : grid.orders) {
    if (!models.count(order)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no language model of order " + std::to_string(order));
    }
  }

  TuneResult result;
  result.objective = grid.objective;
  for (int order : grid.orders) {
    for (double weight : grid.weights) {
      DecodeSetup setup = base;
      setup.beam = true;
      setup.lm = models.at(order).lm;
      setup.trie = models.at(order).trie;
      setup.config.lm_weight = weight;

      std::vector<DecodeOutcome> outcomes(items.size());
      ParallelFor(items.size(), threads, [&](size_t i) {
        outcomes[i] = DecodeMatrix(items[i].emissions, setup);
      });

      TunePoint point;
      point.order = order;
      point.weight = weight;
      std::vector<EvalPair> pairs;
      for (size_t i = 0; i < items.size(); ++i) {
        if (outcomes[i].error && !point.failed) {
          point.failed = true;
          point.error = "item " + std::to_string(i) + ": " + *outcomes[i].error;
        }
        pairs.push_back({std::to_string(i), items[i].reference, outcomes[i].text,
                         outcomes[i].seconds});
      }
      const EvalReport report = Evaluate(pairs);
      point.cer = report.cer;
      point.wer = report.wer;
      point.objective = grid.objective == Objective::kWer ? report.wer : report.cer;
      point.mean_seconds = report.mean_seconds;
      result.points.push_back(point);
    }
  }

  for (size_t i = 0; i < result.points.size(); ++i) {
    const TunePoint& p = result.points[i];
    if (p.failed) continue;
    if (!result.best) {
      result.best = i;
      continue;
    }
    const TunePoint& b = result.points[*result.best];
    if (p.objective < b.objective ||
        (p.objective == b.objective &&
         (p.weight < b.weight || (p.weight == b.weight && p.order < b.order)))) {
      result.best = i;
    }
  }
  return result;
}

std::string TuneResult::ToJson(int indent) const {
  nlohmann::json surface = nlohmann::json::array();
  for (const TunePoint& p : points) {
    nlohmann::json entry = {{"order", p.order},     {"weight", p.weight},
                            {"cer", p.cer},         {"wer", p.wer},
                            {"objective", p.objective}, {"mean_seconds", p.mean_seconds},
                            {"failed", p.failed}};
    if (p.failed) entry["error"] = p.error;
    surface.push_back(entry);
  }
  nlohmann::json out = {{"objective", ObjectiveName(objective)}, {"surface", surface}};
  if (best) {
    const TunePoint& b = points[*best];
    out["best"] = {{"order", b.order}, {"weight", b.weight}, {"objective", b.objective},
                   {"cer", b.cer}, {"wer", b.wer}};
  } else {
    out["best"] = nullptr;
  }
  return out.dump(indent);
}

}  // namespace htrlm
