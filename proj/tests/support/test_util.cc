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

#include "test_util.h"

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>

namespace htrlm::testing {

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  do {
    path_ = std::filesystem::temp_directory_path() /
            ("htrlm-test-" + std::to_string(rng() % 1000000000ULL));
  } while (std::filesystem::exists(path_));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path FixturePath(const std::string& name) {
  return std::filesystem::path(HTRLM_FIXTURES) / name;
}

std::vector<float> RandomLogRows(std::mt19937_64& rng, size_t frames, size_t symbols,
                                 double spread) {
  std::normal_distribution<double> normal(0.0, spread);
  std::vector<float> data(frames * symbols);
  std::vector<double> logits(symbols);
  for (size_t t = 0; t < frames; ++t) {
    double max = -INFINITY;
    for (double& l : logits) max = std::max(max, l = normal(rng));
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - max);
    for (size_t c = 0; c < symbols; ++c) {
      data[t * symbols + c] = static_cast<float>(logits[c] - max - std::log(sum));
    }
  }
  return data;
}

namespace {
std::vector<std::string> Letters(size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('a' + i)));
  return out;
}
}  // namespace

EmissionMatrix RandomCtcMatrix(std::mt19937_64& rng, size_t frames, size_t symbols) {
  std::vector<std::string> vocab{"<ctc>"};
  for (std::string& s : Letters(symbols - 1)) vocab.push_back(s);
  return EmissionMatrix(RandomLogRows(rng, frames, symbols), frames, vocab);
}

EmissionMatrix RandomS2SMatrix(std::mt19937_64& rng, size_t frames, size_t symbols) {
  std::vector<std::string> vocab = Letters(symbols - 1);
  vocab.push_back("<eos>");
  return EmissionMatrix(RandomLogRows(rng, frames, symbols), frames, vocab);
}

EmissionMatrix MatrixFromProbs(const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> vocab) {
  std::vector<float> data;
  for (const auto& row : rows) {
    for (double p : row) data.push_back(static_cast<float>(std::log(p)));
  }
  return EmissionMatrix(std::move(data), rows.size(), std::move(vocab));
}

std::vector<TokenSequence> RandomCorpus(std::mt19937_64& rng, size_t vocab,
                                        size_t sequences, size_t max_length) {
  std::uniform_int_distribution<size_t> token(0, vocab - 1);
  std::uniform_int_distribution<size_t> length(0, max_length);
  std::vector<TokenSequence> corpus(sequences);
  for (TokenSequence& s : corpus) {
    const size_t n = length(rng);
    for (size_t i = 0; i < n; ++i) s.push_back("t" + std::to_string(token(rng)));
  }
  return corpus;
}

CommandResult RunCommand(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buffer;
  size_t n;
  while ((n = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) result.out.append(buffer.data(), n);
  const int status = pclose(pipe);
  result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace htrlm::testing
