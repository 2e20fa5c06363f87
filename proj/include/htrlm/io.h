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

// File formats.
//
// Emissions: a NumPy v1.0 file holding a C-order little-endian float32 array
// of shape (T, V) with natural-log posteriors, plus a vocabulary sidecar
// "<path>.vocab" naming one column per line. Leading sidecar lines starting
// with "#" (and longer than "#" itself) are comments.
//
// Manifest: JSON lines {"id": ..., "emissions": ..., "reference": ...}.
// "emissions" is relative to the manifest's directory. "reference" is
// optional and either inline text or "@file" (also relative).
//
// Hypotheses: JSON lines {"id", "text", "score", "seconds"} plus "error" for
// items that failed and "nbest": [{"text", "score"}, ...] for n-best output.
// Infinite scores are written as null.

#ifndef HTRLM_IO_H_
#define HTRLM_IO_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "htrlm/emissions.h"

namespace htrlm {

struct NpyArray {
  std::vector<float> data;
  size_t rows = 0;
  size_t cols = 0;
};

// Throws BadMagic, UnsupportedDtype, ShapeMismatch (naming the byte offset)
// or Io.
NpyArray ReadNpy(const std::filesystem::path& path);
void WriteNpy(const std::filesystem::path& path, const float* data, size_t rows,
              size_t cols);

std::vector<std::string> ReadVocab(const std::filesystem::path& path);
void WriteVocab(const std::filesystem::path& path, const std::vector<std::string>& vocab);

std::filesystem::path VocabPath(const std::filesystem::path& emissions_path);

// Reads the NPY file and its sidecar and validates the matrix.
EmissionMatrix ReadEmissions(const std::filesystem::path& path);
void WriteEmissions(const EmissionMatrix& matrix, const std::filesystem::path& path);

struct ManifestItem {
  std::string id;
  std::filesystem::path emissions;  // resolved against the manifest directory
  std::optional<std::string> reference;
};

using DatasetManifest = std::vector<ManifestItem>;

// Throws DuplicateId and MissingField (with the line number), Io for missing
// files and InvalidArgument for lines that are not JSON objects.
DatasetManifest LoadManifest(const std::filesystem::path& path);

// Writes emissions paths relative to the manifest directory when possible.
void WriteManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct ScoredText {
  std::string text;
  double score = 0.0;
};

struct HypothesisRecord {
  std::string id;
  std::string text;
  double score = 0.0;
  double seconds = 0.0;
  std::optional<std::string> error;
  std::optional<std::string> warning;
  std::vector<ScoredText> nbest;  // written only when it has several entries
};

std::vector<HypothesisRecord> ReadHypotheses(const std::filesystem::path& path);
void WriteHypotheses(const std::filesystem::path& path,
                     const std::vector<HypothesisRecord>& records);
void WriteHypotheses(std::ostream& out, const std::vector<HypothesisRecord>& records);

// Text files: one item per line, LF endings ("\r\n" is accepted).
std::vector<std::string> ReadLines(const std::filesystem::path& path);
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& contents);

}  // namespace htrlm

#endif  // HTRLM_IO_H_
