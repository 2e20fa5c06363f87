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

// ARPA text format, as produced and consumed by SRILM and KenLM.
//
//   \data\ (header)
//   ngram 1=<count>
//   ...
//
//   \1-grams:
//   <log10 prob>\t<w>\t<log10 backoff>
//   ...
//   \end\ (trailer)
//
// Probabilities are written with 7 significant digits; -inf is written as -99
// and any value <= -99 reads back as -inf.

#ifndef HTRLM_ARPA_H_
#define HTRLM_ARPA_H_

#include <filesystem>
#include <iosfwd>

#include "htrlm/ngram.h"

namespace htrlm {

void WriteArpa(const NGramModel& model, std::ostream& out);
void WriteArpaFile(const NGramModel& model, const std::filesystem::path& path);

// Throws MalformedArpa (with the offending line number) or OrderMismatch.
NGramModel ReadArpa(std::istream& in);
NGramModel ReadArpaFile(const std::filesystem::path& path);

}  // namespace htrlm

#endif  // HTRLM_ARPA_H_
