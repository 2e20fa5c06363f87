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

// Character, word and subword tokenization of transcriptions.
//
// Every level represents U+0020 with the marker "▁" (U+2581), so a token
// sequence can always be turned back into the exact source text. Input is
// NFC-normalized before splitting.

#ifndef HTRLM_TOKENIZER_H_
#define HTRLM_TOKENIZER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace htrlm {

inline constexpr std::string_view kSpaceMarker = "▁";

using TokenSequence = std::vector<std::string>;

enum class TokenizationLevel { kCharacter, kSubword, kWord };

// "character" / "subword" / "word".
std::string_view LevelName(TokenizationLevel level);
TokenizationLevel ParseLevel(std::string_view name);

// One token per Unicode scalar value; spaces become "▁".
TokenSequence TokenizeChars(std::string_view text);

// wordpunct-style split: maximal runs of word characters, maximal runs of
// other non-space characters, and one "▁" per space. Non-space whitespace
// (tabs etc.) forms its own runs.
TokenSequence TokenizeWords(std::string_view text);

// Concatenates tokens, turning every "▁" back into a space. The level does
// not change the result; it is kept so call sites state what they decode.
std::string Detokenize(std::span<const std::string> tokens,
                       TokenizationLevel level);

// Whitespace split used for WER scoring (not the wordpunct rule).
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace htrlm

#endif  // HTRLM_TOKENIZER_H_
