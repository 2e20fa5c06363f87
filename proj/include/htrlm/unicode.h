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

// Thin UTF-8 helpers over ICU.

#ifndef HTRLM_UNICODE_H_
#define HTRLM_UNICODE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace htrlm {

using CodePoint = std::int32_t;

struct Scalar {
  CodePoint code_point;
  std::string_view bytes;  // view into the decoded string
};

// Decodes UTF-8. Ill-formed sequences come back as U+FFFD with the offending
// bytes as their view, so the concatenation of all views is the input.
std::vector<Scalar> DecodeUtf8(std::string_view text);

std::string EncodeUtf8(CodePoint cp);

std::string NormalizeNfc(std::string_view text);

size_t ScalarCount(std::string_view text);

// Python-style \w: letters, numbers and underscore.
bool IsWordCodePoint(CodePoint cp);

bool IsWhitespaceCodePoint(CodePoint cp);

}  // namespace htrlm

#endif  // HTRLM_UNICODE_H_
