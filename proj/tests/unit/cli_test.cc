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

// Drives the htrlm binary end to end.

#include <cmath>
#include <sstream>

#include "ctc_oracle.h"
#include "doctest.h"
#include "htrlm/arpa.h"
#include "htrlm/decoder.h"
#include "htrlm/io.h"
#include "htrlm/subword.h"
#include "json.hpp"
#include "kn_oracle.h"
#include "test_util.h"

namespace htrlm {
namespace {

namespace fs = std::filesystem;
using testing::CommandResult;
using testing::FixturePath;
using testing::TempDir;

CommandResult Run(const std::string& args, bool keep_stderr = false) {
  return testing::RunCommand(std::string(HTRLM_CLI) + " " + args +
                             (keep_stderr ? " 2>&1" : " 2>/dev/null"));
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

TEST_CASE("tokenize reproduces the example rows") {
  const fs::path text = FixturePath("example.txt");
  for (const char* level : {"character", "word"}) {
    const CommandResult r = Run("tokenize --level " + std::string(level) + " --in " + Quote(text));
    CHECK(r.status == 0);
    CHECK(r.out == ReadFile(FixturePath(std::string("example.") + level + ".golden")));
  }
  const CommandResult r = Run("tokenize --level subword --model " +
                              Quote(FixturePath("example.bpe")) + " --in " + Quote(text));
  CHECK(r.status == 0);
  CHECK(r.out == ReadFile(FixturePath("example.subword.golden")));
}

TEST_CASE("tokenize edge cases") {
  TempDir dir;
  WriteFile(dir / "empty.txt", "");
  CommandResult r = Run("tokenize --in " + Quote(dir / "empty.txt"));
  CHECK(r.status == 0);
  CHECK(r.out.empty());

  r = Run("tokenize --in " + Quote(dir / "missing.txt"));
  CHECK(r.status == 1);
  r = Run("tokenize --level sentence --in " + Quote(dir / "empty.txt"));
  CHECK(r.status == 2);
  r = Run("tokenize --level subword --in " + Quote(dir / "empty.txt"));
  CHECK(r.status == 2);
}

TEST_CASE("tokenize trains and applies a BPE model") {
  TempDir dir;
  const std::vector<std::string> corpus = {"low lower lowest", "newer newest wider",
                                           "low low newest", "wide wider widest"};
  std::string text;
  for (const auto& line : corpus) text += line + "\n";
  WriteFile(dir / "toy.txt", text);
  const CommandResult r =
      Run("tokenize --level subword --train-subword 30 --model " + Quote(dir / "toy.bpe") +
          " --lexicon-out " + Quote(dir / "toy.lex") + " --in " + Quote(dir / "toy.txt"));
  REQUIRE(r.status == 0);
  const SubwordModel model = SubwordModel::Train(corpus, 30, SpaceMode::kSeparateSpaces);
  std::string expected;
  for (const auto& line : corpus) {
    const TokenSequence tokens = model.Tokenize(line);
    for (size_t i = 0; i < tokens.size(); ++i) expected += (i ? " " : "") + tokens[i];
    expected += "\n";
  }
  CHECK(r.out == expected);
  std::ostringstream written;
  model.Write(written);
  CHECK(ReadFile(dir / "toy.bpe") == written.str());
  CHECK(fs::file_size(dir / "toy.lex") > 0);
}

TEST_CASE("train-lm writes the Kneser-Ney model") {
  TempDir dir;
  const fs::path corpus_path = FixturePath("kenlm_toy_corpus.txt");
  const CommandResult r = Run("train-lm --order 3 --in " + Quote(corpus_path) + " --out " +
                              Quote(dir / "toy.arpa"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("training_perplexity=") != std::string::npos);

  std::vector<std::vector<std::string>> corpus;
  for (const std::string& line : ReadLines(corpus_path)) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    corpus.push_back(tokens);
  }
  const oracle::KneserNeyOracle oracle(corpus, 3);
  const NGramModel model = ReadArpaFile(dir / "toy.arpa");
  std::vector<std::string> histories = oracle.predictable();
  histories.push_back("<s>");
  size_t checked = 0;
  for (const auto& h1 : histories) {
    for (const auto& h2 : histories) {
      if (h2 == "<s>" && h1 != "<s>") continue;
      for (const auto& w : oracle.predictable()) {
        const std::vector<std::string> history = {h1, h2};
        const double expected = std::log10(oracle.Probability(history, w));
        CHECK(std::abs(model.Conditional(history, w) - expected) < 1e-4);
        ++checked;
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("train-lm failures") {
  TempDir dir;
  WriteFile(dir / "empty.txt", "");
  WriteFile(dir / "toy.txt", "a b\n");
  CommandResult r = Run("train-lm --order 7 --in " + Quote(dir / "toy.txt") + " --out " +
                            Quote(dir / "x.arpa"),
                        true);
  CHECK(r.status == 2);
  CHECK(r.out.find("1-6") != std::string::npos);
  r = Run("train-lm --order 0 --in " + Quote(dir / "toy.txt") + " --out " + Quote(dir / "x.arpa"));
  CHECK(r.status == 2);
  r = Run("train-lm --in " + Quote(dir / "empty.txt") + " --out " + Quote(dir / "x.arpa"));
  CHECK(r.status == 1);
  r = Run("train-lm --smoothing good-turing --in " + Quote(dir / "toy.txt") + " --out " +
          Quote(dir / "x.arpa"));
  CHECK(r.status == 2);
}

TEST_CASE("simulate, greedy decode and evaluate") {
  TempDir dir;
  WriteFile(dir / "text.txt", "the cat sat\non the mat\nabba\n");
  CommandResult r = Run("simulate --text " + Quote(dir / "text.txt") + " --tau 1.5 --seed 4 --out " +
                        Quote(dir / "sim"));
  REQUIRE(r.status == 0);
  const DatasetManifest manifest = LoadManifest(dir / "sim" / "manifest.jsonl");
  REQUIRE(manifest.size() == 3);
  CHECK(manifest[2].reference == "abba");

  r = Run("decode --emissions " + Quote(dir / "sim" / "manifest.jsonl") + " --out " +
          Quote(dir / "hyps.jsonl"));
  REQUIRE(r.status == 0);
  const auto hyps = ReadHypotheses(dir / "hyps.jsonl");
  REQUIRE(hyps.size() == 3);
  for (size_t i = 0; i < hyps.size(); ++i) {
    const EmissionMatrix m = ReadEmissions(manifest[i].emissions);
    CHECK(hyps[i].id == manifest[i].id);
    CHECK(hyps[i].text == LabelsToText(m.vocab(), GreedyCtc(m)));
    CHECK(hyps[i].score == doctest::Approx(BestPathScore(m)));
  }

  r = Run("decode --emissions " + Quote(dir / "sim" / "manifest.jsonl"));
  REQUIRE(r.status == 0);
  // Stdout carries the same records; only the timings differ.
  std::istringstream lines(r.out);
  size_t index = 0;
  for (std::string line; std::getline(lines, line); ++index) {
    const auto record = nlohmann::json::parse(line);
    REQUIRE(index < hyps.size());
    CHECK(record["id"] == hyps[index].id);
    CHECK(record["text"] == hyps[index].text);
    CHECK(record["score"] == hyps[index].score);
  }
  CHECK(index == hyps.size());

  r = Run("evaluate --refs " + Quote(dir / "sim" / "manifest.jsonl") + " --hyps " +
          Quote(dir / "hyps.jsonl") + " --out " + Quote(dir / "report.json"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("CER") != std::string::npos);
  const auto report = nlohmann::json::parse(ReadFile(dir / "report.json"));
  CHECK(report["items"].size() == 3);
}

TEST_CASE("evaluate formats rates with two decimals") {
  TempDir dir;
  WriteFile(dir / "refs.jsonl",
            "{\"id\": \"1\", \"emissions\": \"x.npy\", \"reference\": \"the cat sat\"}\n"
            "{\"id\": \"2\", \"emissions\": \"y.npy\", \"reference\": \"same\"}\n");
  WriteFile(dir / "hyps.jsonl",
            "{\"id\": \"1\", \"text\": \"the mat\", \"score\": 0}\n"
            "{\"id\": \"2\", \"text\": \"same\", \"score\": 0}\n");
  const CommandResult r = Run("evaluate --refs " + Quote(dir / "refs.jsonl") + " --hyps " +
                              Quote(dir / "hyps.jsonl"));
  REQUIRE(r.status == 0);
  // Words: 1 substitution + 1 deletion over 4 reference words.
  CHECK(r.out.find("50.00") != std::string::npos);
  // Characters: "the cat sat" -> "the mat" is 5 edits over 15 reference characters.
  CHECK(r.out.find("33.33") != std::string::npos);

  WriteFile(dir / "partial.jsonl", "{\"id\": \"1\", \"text\": \"x\", \"score\": 0}\n");
  CHECK(Run("evaluate --refs " + Quote(dir / "refs.jsonl") + " --hyps " +
            Quote(dir / "partial.jsonl"))
            .status == 1);
}

TEST_CASE("beam decode matches the labeling oracle") {
  TempDir dir;
  WriteFile(dir / "tokens.txt", "a b a\na a\nb\na b b a\n");
  REQUIRE(Run("train-lm --order 2 --in " + Quote(dir / "tokens.txt") + " --out " +
              Quote(dir / "lm.arpa"))
              .status == 0);
  const NGramModel lm = ReadArpaFile(dir / "lm.arpa");
  std::mt19937_64 rng(77);
  DatasetManifest manifest;
  std::vector<EmissionMatrix> matrices;
  for (int i = 0; i < 5; ++i) {
    matrices.push_back(testing::RandomCtcMatrix(rng, 3, 3));
    const fs::path path = dir / ("m" + std::to_string(i) + ".npy");
    WriteEmissions(matrices.back(), path);
    manifest.push_back({std::to_string(i), path, std::nullopt});
  }
  WriteManifest(dir / "m.jsonl", manifest);
  const CommandResult r =
      Run("decode --lm " + Quote(dir / "lm.arpa") + " --lm-weight 1.5 --beam-size 64 --nbest 2" +
          " --emissions " + Quote(dir / "m.jsonl") + " --out " + Quote(dir / "h.jsonl"));
  REQUIRE(r.status == 0);
  const auto hyps = ReadHypotheses(dir / "h.jsonl");
  REQUIRE(hyps.size() == 5);
  for (size_t i = 0; i < hyps.size(); ++i) {
    const auto ranked = oracle::RankLabelings(matrices[i], &lm, 1.5);
    CHECK(hyps[i].text == LabelsToText(matrices[i].vocab(), ranked[0].labels));
    CHECK(std::abs(hyps[i].score - ranked[0].score) < 1e-6);
    REQUIRE(hyps[i].nbest.size() == 2);
    CHECK(std::abs(hyps[i].nbest[1].score - ranked[1].score) < 1e-6);
  }
}

TEST_CASE("decode usage errors") {
  TempDir dir;
  WriteFile(dir / "tokens.txt", "a b\n");
  REQUIRE(Run("train-lm --order 2 --in " + Quote(dir / "tokens.txt") + " --out " +
              Quote(dir / "lm.arpa"))
              .status == 0);
  WriteFile(dir / "m.jsonl", "");
  CHECK(Run("decode --lm " + Quote(dir / "lm.arpa") + " --lm-level word --emissions " +
            Quote(dir / "m.jsonl"))
            .status == 2);
  CHECK(Run("decode --beam-size 0 --emissions " + Quote(dir / "m.jsonl")).status == 2);
  CHECK(Run("decode --emissions " + Quote(dir / "nope.jsonl")).status == 1);
  CHECK(Run("decode").status == 2);
  CHECK(Run("").status == 2);
  const CommandResult help = Run("decode --help");
  CHECK(help.status == 0);
  CHECK(help.out.find("--lm-weight") != std::string::npos);
}

TEST_CASE("decode reports failed items") {
  TempDir dir;
  WriteFile(dir / "m.jsonl", "{\"id\": \"x\", \"emissions\": \"gone.npy\"}\n");
  const CommandResult r = Run("decode --emissions " + Quote(dir / "m.jsonl") + " --out " +
                              Quote(dir / "h.jsonl"));
  CHECK(r.status == 1);
  const auto hyps = ReadHypotheses(dir / "h.jsonl");
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].error);
}

TEST_CASE("tune over a small grid") {
  TempDir dir;
  WriteFile(dir / "text.txt", "the cat sat\non the mat\n");
  REQUIRE(Run("simulate --text " + Quote(dir / "text.txt") + " --tau 1.0 --out " +
              Quote(dir / "sim"))
              .status == 0);
  REQUIRE(Run("tokenize --in " + Quote(dir / "text.txt") + " --out " + Quote(dir / "tok.txt"))
              .status == 0);
  fs::create_directories(dir / "family");
  for (int order : {2, 3}) {
    REQUIRE(Run("train-lm --order " + std::to_string(order) + " --in " +
                Quote(dir / "tok.txt") + " --out " +
                Quote(dir / "family" / ("o" + std::to_string(order) + ".arpa")))
                .status == 0);
  }
  CommandResult r = Run("tune --valset " + Quote(dir / "sim" / "manifest.jsonl") +
                        " --lm-family " + Quote(dir / "family") +
                        " --weights 0,1 --objective cer --out " + Quote(dir / "s.json"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("best order=") != std::string::npos);
  auto surface = nlohmann::json::parse(ReadFile(dir / "s.json"));
  CHECK(surface["surface"].size() == 4);
  CHECK(surface["surface"][0]["cer"] == surface["surface"][2]["cer"]);

  r = Run("tune --valset " + Quote(dir / "sim" / "manifest.jsonl") + " --lm-family " +
          Quote(dir / "family") + " --weights 1.5 --orders 3 --out -");
  REQUIRE(r.status == 0);
  surface = nlohmann::json::parse(r.out);
  CHECK(surface["surface"].size() == 1);
  CHECK(surface["best"]["order"] == 3);

  CHECK(Run("tune --valset " + Quote(dir / "sim" / "manifest.jsonl") + " --lm-family " +
            Quote(dir / "family") + " --orders 5")
            .status == 2);
  CHECK(Run("tune --valset " + Quote(dir / "sim" / "manifest.jsonl") + " --lm-family " +
            Quote(dir / "family") + " --weights 2:1:1")
            .status == 2);
}

TEST_CASE("simulate is deterministic") {
  TempDir dir;
  WriteFile(dir / "text.txt", "some words here\nmore words\n");
  const std::string base = "simulate --text " + Quote(dir / "text.txt") + " --tau 2 --out ";
  REQUIRE(Run(base + Quote(dir / "a") + " --seed 9").status == 0);
  REQUIRE(Run(base + Quote(dir / "b") + " --seed 9").status == 0);
  REQUIRE(Run(base + Quote(dir / "c") + " --seed 10").status == 0);
  CHECK(ReadFile(dir / "a" / "000001.npy") == ReadFile(dir / "b" / "000001.npy"));
  CHECK(ReadFile(dir / "a" / "000001.npy") != ReadFile(dir / "c" / "000001.npy"));
  CHECK(ReadFile(dir / "a" / "000000.npy.vocab") == ReadFile(dir / "c" / "000000.npy.vocab"));

  REQUIRE(Run("simulate --text " + Quote(dir / "text.txt") + " --tau 0.000001 --out " +
              Quote(dir / "clean"))
              .status == 0);
  const CommandResult r = Run("decode --emissions " + Quote(dir / "clean" / "manifest.jsonl"));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"text\":\"some words here\"") != std::string::npos);
  CHECK(r.out.find("\"text\":\"more words\"") != std::string::npos);
  CHECK(Run(base + Quote(dir / "d") + " --tau -1").status == 2);
}

}  // namespace
}  // namespace htrlm
