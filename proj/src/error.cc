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

#include "htrlm/error.h"

namespace htrlm {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kVocabTooSmall: return "VocabTooSmall";
    case ErrorCode::kMalformedModel: return "MalformedModel";
    case ErrorCode::kOrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDegenerateCounts: return "DegenerateCounts";
    case ErrorCode::kMalformedArpa: return "MalformedArpa";
    case ErrorCode::kOrderMismatch: return "OrderMismatch";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kLexiconMismatch: return "LexiconMismatch";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kMissingTrie: return "MissingTrie";
    case ErrorCode::kTrieWithoutLexiconLevel: return "TrieWithoutLexiconLevel";
    case ErrorCode::kNoCompleteHypothesis: return "NoCompleteHypothesis";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnnormalizedRows: return "UnnormalizedRows";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kUnknownCharacter: return "UnknownCharacter";
  }
  return "Unknown";
}

}  // namespace htrlm
