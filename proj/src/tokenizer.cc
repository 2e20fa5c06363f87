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

#include "htrlm/tokenizer.h"

#include "htrlm/error.h"
#include "htrlm/unicode.h"

namespace htrlm {
namespace {

enum class CharClass { kSpace, kWord, kOtherSpace, kPunct };

CharClass Classify(CodePoint cp) {
  if (cp == ' ') return CharClass::kSpace;
  if (IsWordCodePoint(cp)) return CharClass::kWord;
  if (IsWhitespaceCodePoint(cp)) return CharClass::kOtherSpace;
  return CharClass::kPunct;
}

}  // namespace

std::string_view LevelName(TokenizationLevel level) {
  switch (level) {
    case TokenizationLevel::kCharacter: return "character";
    case TokenizationLevel::kSubword: return "subword";
    case TokenizationLevel::kWord: return "word";
  }
  return "character";
}

TokenizationLevel ParseLevel(std::string_view name) {
  if (name == "character") return TokenizationLevel::kCharacter;
  if (name == "subword") return TokenizationLevel::kSubword;
  if (name == "word") return TokenizationLevel::kWord;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown tokenization level '" + std::string(name) + "'");
}

TokenSequence TokenizeChars(std::string_view text) {
  const std::string normalized = NormalizeNfc(text);
  TokenSequence tokens;
  for (const Scalar& s : DecodeUtf8(normalized)) {
    if (s.code_point == ' ') {
      tokens.emplace_back(kSpaceMarker);
    } else {
      tokens.emplace_back(s.bytes);
    }
  }
  return tokens;
}

TokenSequence TokenizeWords(std::string_view text) {
  const std::string normalized = NormalizeNfc(text);
  TokenSequence tokens;
  CharClass run_class = CharClass::kSpace;
  for (const Scalar& s : DecodeUtf8(normalized)) {
    const CharClass cls = Classify(s.code_point);
    if (cls == CharClass::kSpace) {
      tokens.emplace_back(kSpaceMarker);
    } else if (!tokens.empty() && cls == run_class &&
               cls != CharClass::kOtherSpace) {
      tokens.back().append(s.bytes);
    } else {
      tokens.emplace_back(s.bytes);
    }
    run_class = cls;
  }
  return tokens;
}

std::string Detokenize(std::span<const std::string> tokens,
                       TokenizationLevel /*level*/) {
  std::string out;
  for (const std::string& token : tokens) {
    size_t pos = 0;
    while (pos < token.size()) {
      const size_t hit = token.find(kSpaceMarker, pos);
      if (hit == std::string::npos) {
        out.append(token, pos, std::string::npos);
        break;
      }
      out.append(token, pos, hit - pos);
      out.push_back(' ');
      pos = hit + kSpaceMarker.size();
    }
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (const Scalar& s : DecodeUtf8(text)) {
    if (IsWhitespaceCodePoint(s.code_point)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.append(s.bytes);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace htrlm
