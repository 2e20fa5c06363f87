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

#include "htrlm/arpa.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "htrlm/error.h"

namespace htrlm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kCommentPrefix = "# htrlm smoothing=";

std::string FormatScore(double value) {
  if (std::isinf(value) && value < 0) return "-99";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7g", value);
  return buf;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

bool ParseDouble(std::string_view text, double& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

Error Malformed(size_t line_no, const std::string& what) {
  return Error(ErrorCode::kMalformedArpa,
               "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

void WriteArpa(const NGramModel& model, std::ostream& out) {
  const Vocabulary& vocab = model.vocab();
  if (model.smoothing()) {
    out << kCommentPrefix << SmoothingName(*model.smoothing())
        << " order=" << model.order() << "\n\n";
  }
  out << "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    out << "ngram " << k << '=' << model.table(k).size() << '\n';
  }
  for (int k = 1; k <= model.order(); ++k) {
    out << "\n\\" << k << "-grams:\n";
    std::vector<std::pair<std::string, const NGramModel::Entry*>> lines;
    lines.reserve(model.table(k).size());
    for (const auto& [gram, entry] : model.table(k)) {
      std::string words;
      for (TokenId id : gram.view()) {
        if (!words.empty()) words.push_back(' ');
        words += vocab.Token(id);
      }
      lines.emplace_back(std::move(words), &entry);
    }
    std::sort(lines.begin(), lines.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [words, entry] : lines) {
      out << FormatScore(entry->log10_prob) << '\t' << words;
      if (k < model.order() && entry->has_backoff) {
        out << '\t' << FormatScore(entry->log10_backoff);
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void WriteArpaFile(const NGramModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteArpa(model, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

NGramModel ReadArpa(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  std::optional<Smoothing> smoothing;

  // Preamble up to \data\.
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "\\data\\") {
      saw_data = true;
      break;
    }
    if (line.rfind(kCommentPrefix, 0) == 0) {
      std::istringstream rest(line.substr(kCommentPrefix.size()));
      std::string name;
      rest >> name;
      try {
        smoothing = ParseSmoothing(name);
      } catch (const Error&) {
        smoothing.reset();
      }
    }
  }
  if (!saw_data) throw Malformed(line_no, "missing \\data\\ header");

  std::map<int, size_t> declared;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (declared.empty()) continue;
      break;
    }
    if (line.rfind("ngram ", 0) != 0) {
      throw Malformed(line_no, "expected 'ngram <k>=<count>'");
    }
    const size_t eq = line.find('=');
    int k = 0;
    long long count = -1;
    if (eq == std::string::npos ||
        std::from_chars(line.data() + 6, line.data() + eq, k).ec != std::errc() ||
        std::from_chars(line.data() + eq + 1, line.data() + line.size(), count)
                .ec != std::errc() ||
        count < 0) {
      throw Malformed(line_no, "bad ngram count line '" + line + "'");
    }
    if (k < 1 || k > kMaxOrder) {
      throw Error(ErrorCode::kOrderOutOfRange,
                  "line " + std::to_string(line_no) + ": order " +
                      std::to_string(k) + " outside 1-" + std::to_string(kMaxOrder));
    }
    if (!declared.emplace(k, static_cast<size_t>(count)).second) {
      throw Malformed(line_no, "order " + std::to_string(k) + " declared twice");
    }
  }
  if (declared.empty()) throw Malformed(line_no, "no ngram counts in header");
  const int order = declared.rbegin()->first;
  if (static_cast<size_t>(order) != declared.size()) {
    throw Error(ErrorCode::kOrderMismatch,
                "header declares orders that are not 1.." + std::to_string(order));
  }

  Vocabulary vocab;
  std::vector<NGramMap<NGramModel::Entry>> tables(order);
  std::vector<bool> seen_section(order, false);
  int current = 0;  // order of the section being read, 0 = none
  size_t current_lines = 0;
  bool saw_end = false;

  auto close_section = [&]() {
    if (current == 0) return;
    if (current_lines != declared[current]) {
      throw Malformed(line_no, "\\" + std::to_string(current) + "-grams: has " +
                                   std::to_string(current_lines) +
                                   " entries, header declares " +
                                   std::to_string(declared[current]));
    }
    current = 0;
  };

  std::vector<TokenId> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '\\') {
      close_section();
      if (line == "\\end\\") {
        saw_end = true;
        break;
      }
      int k = 0;
      const std::string suffix = "-grams:";
      if (line.size() <= suffix.size() + 1 ||
          line.compare(line.size() - suffix.size(), suffix.size(), suffix) != 0 ||
          std::from_chars(line.data() + 1, line.data() + line.size() - suffix.size(),
                          k)
                  .ec != std::errc()) {
        throw Malformed(line_no, "bad section header '" + line + "'");
      }
      if (k < 1 || k > order) {
        throw Error(ErrorCode::kOrderMismatch,
                    "line " + std::to_string(line_no) + ": section \\" +
                        std::to_string(k) + "-grams: not declared in \\data\\");
      }
      if (seen_section[k - 1]) throw Malformed(line_no, "duplicate section");
      seen_section[k - 1] = true;
      current = k;
      current_lines = 0;
      continue;
    }
    if (current == 0) throw Malformed(line_no, "entry outside any section");

    const auto fields = SplitFields(line);
    const size_t k = static_cast<size_t>(current);
    if (fields.size() != k + 1 && fields.size() != k + 2) {
      throw Malformed(line_no, "expected " + std::to_string(k) + " tokens");
    }
    NGramModel::Entry entry;
    if (!ParseDouble(fields[0], entry.log10_prob)) {
      throw Malformed(line_no, "bad probability '" + std::string(fields[0]) + "'");
    }
    if (entry.log10_prob <= -99.0) entry.log10_prob = kNegInf;
    if (fields.size() == k + 2) {
      if (!ParseDouble(fields[k + 1], entry.log10_backoff)) {
        throw Malformed(line_no, "bad backoff '" + std::string(fields[k + 1]) + "'");
      }
      if (entry.log10_backoff <= -99.0) entry.log10_backoff = kNegInf;
      entry.has_backoff = true;
    }
    ids.clear();
    for (size_t i = 1; i <= k; ++i) {
      if (k == 1) {
        ids.push_back(vocab.Add(fields[i]));
      } else {
        auto id = vocab.Lookup(fields[i]);
        if (!id) {
          throw Malformed(line_no, "token '" + std::string(fields[i]) +
                                       "' missing from \\1-grams:");
        }
        ids.push_back(*id);
      }
    }
    if (!tables[k - 1].emplace(NGramKey(ids), entry).second) {
      throw Malformed(line_no, "duplicate n-gram");
    }
    if (++current_lines > declared[current]) {
      throw Malformed(line_no, "more entries than declared for order " +
                                   std::to_string(current));
    }
  }
  if (!saw_end) throw Malformed(line_no, "missing \\end\\");
  for (int k = 1; k <= order; ++k) {
    if (!seen_section[k - 1]) {
      throw Error(ErrorCode::kOrderMismatch,
                  "missing section \\" + std::to_string(k) + "-grams:");
    }
  }
  return NGramModel(order, std::move(vocab), std::move(tables), smoothing);
}

NGramModel ReadArpaFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadArpa(in);
}

}  // namespace htrlm
