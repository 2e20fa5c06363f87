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

// htrlm: n-gram language models for text-recognition decoding.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "htrlm/arpa.h"
#include "htrlm/batch.h"
#include "htrlm/decoder.h"
#include "htrlm/error.h"
#include "htrlm/io.h"
#include "htrlm/lexicon.h"
#include "htrlm/metrics.h"
#include "htrlm/ngram.h"
#include "htrlm/simulate.h"
#include "htrlm/subword.h"
#include "htrlm/tokenizer.h"
#include "htrlm/tune.h"

namespace fs = std::filesystem;
using namespace htrlm;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, TokenizationLevel> kLevels = {
    {"character", TokenizationLevel::kCharacter},
    {"subword", TokenizationLevel::kSubword},
    {"word", TokenizationLevel::kWord}};

const std::map<std::string, Smoothing> kSmoothings = {
    {"none", Smoothing::kNone},
    {"kneser-ney", Smoothing::kKneserNey},
    {"witten-bell", Smoothing::kWittenBell}};

const std::map<std::string, SpaceMode> kSpaceModes = {
    {"separate-spaces", SpaceMode::kSeparateSpaces},
    {"sentencepiece", SpaceMode::kSentencePiece}};

const std::map<std::string, Objective> kObjectives = {{"wer", Objective::kWer},
                                                      {"cer", Objective::kCer}};

// Token files hold one sequence per line, tokens separated by U+0020.
std::vector<TokenSequence> ReadTokenFile(const fs::path& path) {
  std::vector<TokenSequence> sequences;
  for (const std::string& line : ReadLines(path)) {
    TokenSequence tokens;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t next = line.find(' ', pos);
      if (next == std::string::npos) next = line.size();
      if (next > pos) tokens.push_back(line.substr(pos, next - pos));
      pos = next + 1;
    }
    sequences.push_back(std::move(tokens));
  }
  return sequences;
}

std::string JoinTokens(const TokenSequence& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// "-" means stdout.
void WriteOutput(const std::string& path, const std::string& contents) {
  if (path == "-") {
    std::cout << contents;
  } else {
    WriteFile(path, contents);
  }
}

void CheckOrder(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw UsageError("--order " + std::to_string(order) +
                     " is outside the supported range 1-6");
  }
}

Lexicon ReadLexiconFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return Lexicon::Read(in);
}

// ---------------------------------------------------------------------------
// tokenize

struct TokenizeArgs {
  std::string level = "character";
  std::string input;
  std::string output = "-";
  std::string model;
  size_t train_subword = 0;
  std::string space_mode = "separate-spaces";
  std::string lexicon_out;
};

void AddTokenize(CLI::App& app, TokenizeArgs& a) {
  auto* cmd = app.add_subcommand("tokenize", "Tokenize a text corpus, one line per sequence");
  cmd->add_option("--level", a.level, "Tokenization level")
      ->transform(CLI::IsMember(kLevels))
      ->capture_default_str();
  cmd->add_option("--in", a.input, "Input text, one sequence per line")->required();
  cmd->add_option("--out", a.output, "Output token file ('-' for stdout)")
      ->capture_default_str();
  cmd->add_option("--model", a.model,
                  "Subword model to apply, or to write with --train-subword");
  cmd->add_option("--train-subword", a.train_subword,
                  "Train a BPE model with this vocabulary size on --in and save it to "
                  "--model");
  cmd->add_option("--space-mode", a.space_mode,
                  "Subword space handling when training; separate-spaces keeps the "
                  "space marker as its own token")
      ->transform(CLI::IsMember(kSpaceModes))
      ->capture_default_str();
  cmd->add_option("--lexicon-out", a.lexicon_out,
                  "Also write the lexicon (unit, spelling) of the tokenized corpus");
}

int RunTokenize(const TokenizeArgs& a) {
  const TokenizationLevel level = ParseLevel(a.level);
  if (level != TokenizationLevel::kSubword && (a.train_subword || !a.model.empty())) {
    throw UsageError("--model and --train-subword apply to --level subword only");
  }
  if (level == TokenizationLevel::kSubword && a.model.empty()) {
    throw UsageError("--level subword needs --model");
  }
  if (level == TokenizationLevel::kCharacter && !a.lexicon_out.empty()) {
    throw UsageError("character level has no lexicon (--lexicon-out)");
  }

  const std::vector<std::string> lines = ReadLines(a.input);
  std::optional<SubwordModel> subword;
  if (level == TokenizationLevel::kSubword) {
    if (a.train_subword) {
      subword = SubwordModel::Train(lines, a.train_subword, ParseSpaceMode(a.space_mode));
      std::ostringstream model_text;
      subword->Write(model_text);
      WriteFile(a.model, model_text.str());
    } else {
      std::ifstream in(a.model);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + a.model);
      subword = SubwordModel::Read(in);
    }
  }

  std::vector<TokenSequence> corpus;
  std::string out;
  for (const std::string& line : lines) {
    TokenSequence tokens = level == TokenizationLevel::kCharacter ? TokenizeChars(line)
                           : level == TokenizationLevel::kWord    ? TokenizeWords(line)
                                                                  : subword->Tokenize(line);
    out += JoinTokens(tokens);
    out += '\n';
    corpus.push_back(std::move(tokens));
  }
  WriteOutput(a.output, out);

  if (!a.lexicon_out.empty()) {
    std::ostringstream lexicon_text;
    Lexicon::Build(corpus, level).Write(lexicon_text);
    WriteFile(a.lexicon_out, lexicon_text.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train-lm

struct TrainArgs {
  int order = 6;
  std::string smoothing = "kneser-ney";
  std::string input;
  std::string output;
};

void AddTrain(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train-lm", "Estimate an n-gram model and write ARPA");
  cmd->add_option("--order", a.order,
                  "N-gram order, 1-6 (6 suits character and subword units, 3 suits "
                  "words)")
      ->capture_default_str();
  cmd->add_option("--smoothing", a.smoothing, "Smoothing method")
      ->transform(CLI::IsMember(kSmoothings))
      ->capture_default_str();
  cmd->add_option("--in", a.input, "Token file from 'tokenize'")->required();
  cmd->add_option("--out", a.output, "Output ARPA file")->required();
}

int RunTrain(const TrainArgs& a) {
  CheckOrder(a.order);
  const std::vector<TokenSequence> corpus = ReadTokenFile(a.input);
  const NGramModel model =
      NGramModel::Estimate(CountTable::Count(corpus, a.order), ParseSmoothing(a.smoothing));
  WriteArpaFile(model, a.output);
  std::printf("order=%d smoothing=%s sequences=%zu training_perplexity=%.6f\n", a.order,
              a.smoothing.c_str(), corpus.size(), model.Perplexity(corpus));
  return 0;
}

// ---------------------------------------------------------------------------
// shared decoding flags

struct SearchArgs {
  std::string level = "character";
  std::string lexicon;
  std::optional<double> lm_weight;
  size_t beam_size = 25;
  size_t nbest = 1;
  double unit_insertion = 0.0;
  double token_beam_threshold = std::numeric_limits<double>::infinity();
  double beam_threshold = std::numeric_limits<double>::infinity();
  bool adapt_s2s = false;
  size_t threads = 1;
};

void AddSearchFlags(CLI::App* cmd, SearchArgs& a) {
  cmd->add_option("--lm-level", a.level, "Unit level of the language model")
      ->transform(CLI::IsMember(kLevels))
      ->capture_default_str();
  cmd->add_option("--lexicon", a.lexicon,
                  "Lexicon file (required for subword and word LMs)");
  cmd->add_option("--lm-weight", a.lm_weight,
                  "LM weight; default 1.5 for character and subword LMs, 0.5 for word "
                  "LMs (grid-search optima)");
  cmd->add_option("--beam-size", a.beam_size, "Beam size")->capture_default_str();
  cmd->add_option("--unit-insertion", a.unit_insertion,
                  "Score added per LM unit (natural log)")
      ->capture_default_str();
  cmd->add_option("--token-beam-threshold", a.token_beam_threshold,
                  "Skip symbols this far (natural log) below a frame's best; default "
                  "off");
  cmd->add_option("--beam-threshold", a.beam_threshold,
                  "Drop hypotheses this far below the best; default off");
  cmd->add_flag("--adapt-s2s", a.adapt_s2s,
                "Insert blank frames into seq2seq emissions so the CTC decoder can "
                "run on them");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
}

DecodeSetup MakeSetup(const SearchArgs& a, bool beam) {
  DecodeSetup setup;
  setup.beam = beam;
  setup.adapt_s2s = a.adapt_s2s;
  setup.config.lm_level = ParseLevel(a.level);
  setup.config.beam_size = a.beam_size;
  setup.config.nbest = a.nbest;
  setup.config.unit_insertion_score = a.unit_insertion;
  setup.config.token_beam_threshold = a.token_beam_threshold;
  setup.config.beam_threshold = a.beam_threshold;
  setup.config.lm_weight = a.lm_weight.value_or(DefaultLmWeight(setup.config.lm_level));
  try {
    setup.config.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const bool lexicon_level = setup.config.lm_level != TokenizationLevel::kCharacter;
  if (beam && lexicon_level && a.lexicon.empty()) {
    throw UsageError("--lm-level " + a.level + " needs --lexicon");
  }
  if (!lexicon_level && !a.lexicon.empty()) {
    throw UsageError("--lexicon requires --lm-level subword or word");
  }
  return setup;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeArgs {
  std::string manifest;
  std::string lm;
  std::string output = "-";
  SearchArgs search;
};

void AddDecode(CLI::App& app, DecodeArgs& a) {
  auto* cmd = app.add_subcommand(
      "decode", "Decode emission matrices; greedy without --lm, beam search with it");
  cmd->add_option("--emissions", a.manifest, "Manifest (JSON lines) of emission files")
      ->required();
  cmd->add_option("--lm", a.lm, "ARPA language model for shallow fusion");
  cmd->add_option("--out", a.output, "Hypotheses (JSON lines, '-' for stdout)")
      ->capture_default_str();
  cmd->add_option("--nbest", a.search.nbest, "Hypotheses kept per item")
      ->capture_default_str();
  AddSearchFlags(cmd, a.search);
}

int RunDecode(const DecodeArgs& a) {
  const bool beam = !a.lm.empty();
  DecodeSetup setup = MakeSetup(a.search, beam);
  const DatasetManifest manifest = LoadManifest(a.manifest);

  std::unique_ptr<NGramModel> lm;
  std::unique_ptr<LexiconTrie> trie;
  if (beam) {
    lm = std::make_unique<NGramModel>(ReadArpaFile(a.lm));
    if (!a.search.lexicon.empty()) {
      trie = std::make_unique<LexiconTrie>(
          LexiconTrie::Build(ReadLexiconFile(a.search.lexicon), *lm));
    }
  }
  setup.lm = lm.get();
  setup.trie = trie.get();

  const std::vector<HypothesisRecord> records =
      DecodeManifest(manifest, setup, a.search.threads);
  size_t failed = 0;
  for (const HypothesisRecord& record : records) {
    if (record.error) {
      ++failed;
      std::cerr << "htrlm decode: item '" << record.id << "' failed: " << *record.error
                << '\n';
    }
    if (record.warning) {
      std::cerr << "htrlm decode: item '" << record.id << "': " << *record.warning << '\n';
    }
  }
  if (a.output == "-") {
    WriteHypotheses(std::cout, records);
  } else {
    WriteHypotheses(a.output, records);
  }
  if (failed) {
    std::cerr << "htrlm decode: " << failed << " of " << records.size()
              << " items failed\n";
    return kExitData;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string refs;
  std::string hyps;
  std::string output;
};

void AddEvaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand("evaluate", "Score hypotheses: CER and WER");
  cmd->add_option("--refs", a.refs, "Manifest with references")->required();
  cmd->add_option("--hyps", a.hyps, "Hypotheses from 'decode'")->required();
  cmd->add_option("--out", a.output, "JSON report (the table goes to stdout)");
}

int RunEvaluate(const EvaluateArgs& a) {
  const DatasetManifest refs = LoadManifest(a.refs);
  std::map<std::string, HypothesisRecord> hyps;
  for (HypothesisRecord& record : ReadHypotheses(a.hyps)) {
    const std::string id = record.id;
    hyps.emplace(id, std::move(record));
  }
  std::vector<EvalPair> pairs;
  for (const ManifestItem& item : refs) {
    if (!item.reference) {
      throw Error(ErrorCode::kMissingField, "manifest item '" + item.id + "' has no reference");
    }
    auto it = hyps.find(item.id);
    if (it == hyps.end()) {
      throw Error(ErrorCode::kMissingField, "no hypothesis for item '" + item.id + "'");
    }
    if (it->second.error) {
      std::cerr << "htrlm evaluate: item '" << item.id
                << "' failed to decode; scored as empty\n";
    }
    pairs.push_back({item.id, *item.reference, it->second.text, it->second.seconds});
  }
  const EvalReport report = Evaluate(pairs);
  if (!a.output.empty()) WriteFile(a.output, report.ToJson() + "\n");
  std::cout << report.ToTable();
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneArgs {
  std::string valset;
  std::string family;
  std::string weights = "0:5:0.5";
  std::vector<int> orders;
  std::string objective = "wer";
  std::string output;
  SearchArgs search;
};

void AddTune(CLI::App& app, TuneArgs& a) {
  auto* cmd = app.add_subcommand("tune", "Grid search over LM order and LM weight");
  cmd->add_option("--valset", a.valset, "Validation manifest with references")->required();
  cmd->add_option("--lm-family", a.family,
                  "Directory of ARPA files (*.arpa), one per order")
      ->required();
  cmd->add_option("--weights", a.weights, "Weight grid: start:stop:step or a comma list")
      ->capture_default_str();
  cmd->add_option("--orders", a.orders, "Orders to try (default: every order found)");
  cmd->add_option("--objective", a.objective, "Quantity to minimize")
      ->transform(CLI::IsMember(kObjectives))
      ->capture_default_str();
  cmd->add_option("--out", a.output, "Surface JSON ('-' for stdout)");
  AddSearchFlags(cmd, a.search);
}

int RunTune(const TuneArgs& a) {
  TuneGrid grid;
  try {
    grid.weights = ParseWeightRange(a.weights);
  } catch (const Error& e) {
    throw UsageError(std::string("--weights: ") + e.what());
  }
  grid.objective = ParseObjective(a.objective);
  for (int order : a.orders) CheckOrder(order);
  const DecodeSetup base = MakeSetup(a.search, true);

  if (!fs::is_directory(a.family)) {
    throw Error(ErrorCode::kIo, a.family + " is not a directory");
  }
  std::vector<fs::path> arpas;
  for (const auto& entry : fs::directory_iterator(a.family)) {
    if (entry.path().extension() == ".arpa") arpas.push_back(entry.path());
  }
  std::sort(arpas.begin(), arpas.end());
  std::map<int, std::unique_ptr<NGramModel>> lms;
  for (const fs::path& path : arpas) {
    auto model = std::make_unique<NGramModel>(ReadArpaFile(path));
    const int order = model->order();
    if (lms.count(order)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "two models of order " + std::to_string(order) + " in " + a.family);
    }
    lms.emplace(order, std::move(model));
  }
  if (lms.empty()) throw Error(ErrorCode::kIo, "no .arpa files in " + a.family);
  if (a.orders.empty()) {
    grid.orders.clear();
    for (const auto& [order, model] : lms) grid.orders.push_back(order);
  } else {
    grid.orders = a.orders;
    for (int order : grid.orders) {
      if (!lms.count(order)) {
        throw UsageError("no model of order " + std::to_string(order) + " in " + a.family);
      }
    }
  }

  std::optional<Lexicon> lexicon;
  if (!a.search.lexicon.empty()) lexicon = ReadLexiconFile(a.search.lexicon);
  std::map<int, std::unique_ptr<LexiconTrie>> tries;
  std::map<int, TuneModel> models;
  for (int order : grid.orders) {
    TuneModel model;
    model.lm = lms.at(order).get();
    if (lexicon) {
      tries[order] = std::make_unique<LexiconTrie>(LexiconTrie::Build(*lexicon, *model.lm));
      model.trie = tries[order].get();
    }
    models[order] = model;
  }

  std::vector<TuneItem> items;
  for (const ManifestItem& item : LoadManifest(a.valset)) {
    if (!item.reference) {
      throw Error(ErrorCode::kMissingField, "manifest item '" + item.id + "' has no reference");
    }
    items.push_back({ReadEmissions(item.emissions), *item.reference});
  }

  const TuneResult result = Tune(items, grid, models, base, a.search.threads);
  for (const TunePoint& point : result.points) {
    if (point.failed) {
      std::cerr << "htrlm tune: order " << point.order << " weight " << point.weight
                << " failed: " << point.error << '\n';
    }
  }
  if (!a.output.empty()) WriteOutput(a.output, result.ToJson() + "\n");
  if (!result.best) {
    std::cerr << "htrlm tune: every grid point failed\n";
    return kExitData;
  }
  const TunePoint& best = result.points[*result.best];
  std::fprintf(a.output == "-" ? stderr : stdout,
               "best order=%d weight=%g %s=%.2f%% (cer=%.2f%% wer=%.2f%%)\n", best.order,
               best.weight, std::string(ObjectiveName(result.objective)).c_str(),
               best.objective * 100, best.cer * 100, best.wer * 100);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string text;
  std::string output;
  double tau = 1.0;
  double margin = 5.0;
  double blank_affinity = 0.0;
  size_t frames_per_char = 1;
  uint64_t seed = 0;
  std::string vocab;
  std::string neighborhood;
};

void AddSimulate(CLI::App& app, SimulateArgs& a) {
  auto* cmd = app.add_subcommand(
      "simulate", "Synthesize noisy CTC emissions for each line of a text file");
  cmd->add_option("--text", a.text, "Reference text, one line per item")->required();
  cmd->add_option("--out", a.output, "Output directory (matrices and manifest.jsonl)")
      ->required();
  cmd->add_option("--tau", a.tau, "Noise temperature")->capture_default_str();
  cmd->add_option("--margin", a.margin, "Logit bonus of the correct symbol")
      ->capture_default_str();
  cmd->add_option("--blank-affinity", a.blank_affinity,
                  "Fraction of the margin given to blank on character frames")
      ->capture_default_str();
  cmd->add_option("--frames-per-char", a.frames_per_char, "Frames per character")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--vocab", a.vocab,
                  "Symbol list, one per line, including <ctc> (default: characters of "
                  "--text)");
  cmd->add_option("--neighborhood", a.neighborhood,
                  "Confusion map: lines '<char>\\t<char> <char> ...' (default: uniform)");
}

int RunSimulate(const SimulateArgs& a) {
  NoiseModel noise;
  noise.tau = a.tau;
  noise.margin = a.margin;
  noise.blank_affinity = a.blank_affinity;
  noise.frames_per_char = a.frames_per_char;
  try {
    noise.Validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!a.neighborhood.empty()) {
    for (const std::string& line : ReadLines(a.neighborhood)) {
      if (line.empty()) continue;
      const size_t tab = line.find('\t');
      if (tab == std::string::npos || tab == 0) {
        throw Error(ErrorCode::kMalformedModel, "bad neighborhood line '" + line + "'");
      }
      std::vector<std::string> neighbors;
      std::istringstream rest(line.substr(tab + 1));
      for (std::string n; rest >> n;) neighbors.push_back(n);
      noise.neighborhood[line.substr(0, tab)] = std::move(neighbors);
    }
  }

  const std::vector<std::string> lines = ReadLines(a.text);
  const std::vector<std::string> vocab =
      a.vocab.empty() ? VocabFromText(lines) : ReadVocab(a.vocab);
  const fs::path dir(a.output);
  fs::create_directories(dir);
  DatasetManifest manifest;
  for (size_t i = 0; i < lines.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu", i);
    noise.seed = ItemSeed(a.seed, i);
    const EmissionMatrix matrix = Synthesize(lines[i], noise, vocab);
    const fs::path path = dir / (std::string(name) + ".npy");
    WriteEmissions(matrix, path);
    manifest.push_back({name, path, lines[i]});
  }
  WriteManifest(dir / "manifest.jsonl", manifest);
  std::printf("wrote %zu items to %s\n", lines.size(), (dir / "manifest.jsonl").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"htrlm: n-gram language models for handwriting-recognition decoding"};
  app.require_subcommand(1);
  TokenizeArgs tokenize;
  TrainArgs train;
  DecodeArgs decode;
  EvaluateArgs evaluate;
  TuneArgs tune;
  SimulateArgs simulate;
  AddTokenize(app, tokenize);
  AddTrain(app, train);
  AddDecode(app, decode);
  AddEvaluate(app, evaluate);
  AddTune(app, tune);
  AddSimulate(app, simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "tokenize") return RunTokenize(tokenize);
    if (command == "train-lm") return RunTrain(train);
    if (command == "decode") return RunDecode(decode);
    if (command == "evaluate") return RunEvaluate(evaluate);
    if (command == "tune") return RunTune(tune);
    if (command == "simulate") return RunSimulate(simulate);
  } catch (const UsageError& e) {
    std::cerr << "htrlm " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "htrlm " << command << ": " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
