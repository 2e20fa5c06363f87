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

#include "htrlm/io.h"

#include <bit>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "htrlm/error.h"
#include "json.hpp"

namespace htrlm {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "NPY payloads are read as little-endian float32");

constexpr char kNpyMagic[] = "\x93NUMPY";
constexpr size_t kNpyMagicSize = 6;
constexpr std::string_view kVocabComment =
    "# natural-log posteriors; one symbol per emission column";

std::string Where(const fs::path& path) { return path.string() + ": "; }

std::ifstream OpenIn(const fs::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream OpenOut(const fs::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

// Value of `key` in the NPY header dict, e.g. "'<f4'" or "(2, 3)".
std::optional<std::string> HeaderValue(const std::string& header, const std::string& key) {
  const std::string quoted = "'" + key + "'";
  size_t pos = header.find(quoted);
  if (pos == std::string::npos) return std::nullopt;
  pos = header.find(':', pos + quoted.size());
  if (pos == std::string::npos) return std::nullopt;
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  size_t end = pos;
  if (pos < header.size() && header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) return std::nullopt;
    ++end;
  } else if (pos < header.size() && (header[pos] == '\'' || header[pos] == '"')) {
    end = header.find(header[pos], pos + 1);
    if (end == std::string::npos) return std::nullopt;
    ++end;
  } else {
    while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  }
  return header.substr(pos, end - pos);
}

std::vector<size_t> ParseShape(const std::string& tuple, const fs::path& path) {
  std::vector<size_t> dims;
  std::string inner = tuple.substr(1, tuple.size() - 2);
  std::stringstream stream(inner);
  std::string part;
  while (std::getline(stream, part, ',')) {
    const size_t first = part.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    part = part.substr(first, part.find_last_not_of(' ') - first + 1);
    size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size()) {
      throw Error(ErrorCode::kShapeMismatch, Where(path) + "bad shape entry '" + part + "'");
    }
    dims.push_back(static_cast<size_t>(value));
  }
  return dims;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string RelativeTo(const fs::path& target, const fs::path& base) {
  std::error_code ec;
  fs::path relative = fs::relative(target, base.empty() ? fs::path(".") : base, ec);
  if (ec || relative.empty()) return target.string();
  return relative.generic_string();
}

}  // namespace

NpyArray ReadNpy(const fs::path& path) {
  std::ifstream in = OpenIn(path, true);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < kNpyMagicSize + 4 ||
      std::memcmp(bytes.data(), kNpyMagic, kNpyMagicSize) != 0) {
    throw Error(ErrorCode::kBadMagic, Where(path) + "missing NPY magic at byte 0");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  const auto minor = static_cast<unsigned char>(bytes[7]);
  if (major != 1 || minor != 0) {
    throw Error(ErrorCode::kBadMagic, Where(path) + "unsupported NPY version " +
                                          std::to_string(major) + "." +
                                          std::to_string(minor) + " at byte 6");
  }
  const size_t header_len = static_cast<unsigned char>(bytes[8]) |
                            (static_cast<size_t>(static_cast<unsigned char>(bytes[9])) << 8);
  const size_t data_offset = 10 + header_len;
  if (bytes.size() < data_offset) {
    throw Error(ErrorCode::kShapeMismatch,
                Where(path) + "header runs past end of file at byte " +
                    std::to_string(bytes.size()));
  }
  const std::string header = bytes.substr(10, header_len);

  const auto descr = HeaderValue(header, "descr");
  if (!descr || (*descr != "'<f4'" && *descr != "\"<f4\"")) {
    throw Error(ErrorCode::kUnsupportedDtype,
                Where(path) + "dtype " + descr.value_or("(missing)") +
                    " at byte 10; only '<f4' is supported");
  }
  const auto fortran = HeaderValue(header, "fortran_order");
  if (!fortran || *fortran != "False") {
    throw Error(ErrorCode::kUnsupportedDtype,
                Where(path) + "only C-order arrays are supported (byte 10)");
  }
  const auto shape_text = HeaderValue(header, "shape");
  if (!shape_text || shape_text->front() != '(') {
    throw Error(ErrorCode::kShapeMismatch, Where(path) + "header has no shape (byte 10)");
  }
  const std::vector<size_t> shape = ParseShape(*shape_text, path);
  if (shape.size() != 2) {
    throw Error(ErrorCode::kShapeMismatch,
                Where(path) + "expected a 2-d (T, V) array, got shape " + *shape_text);
  }

  NpyArray array;
  array.rows = shape[0];
  array.cols = shape[1];
  const size_t expected = array.rows * array.cols * sizeof(float);
  const size_t available = bytes.size() - data_offset;
  if (available != expected) {
    throw Error(ErrorCode::kShapeMismatch,
                Where(path) + "payload at byte " + std::to_string(data_offset) + " has " +
                    std::to_string(available) + " bytes, shape needs " +
                    std::to_string(expected));
  }
  array.data.resize(array.rows * array.cols);
  if (expected) std::memcpy(array.data.data(), bytes.data() + data_offset, expected);
  return array;
}

void WriteNpy(const fs::path& path, const float* data, size_t rows, size_t cols) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" +
                       std::to_string(rows) + ", " + std::to_string(cols) + "), }";
  // Pad so that magic + version + length + header is a multiple of 64.
  const size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::ofstream out = OpenOut(path, true);
  out.write(kNpyMagic, kNpyMagicSize);
  out.put(1);
  out.put(0);
  out.put(static_cast<char>(header.size() & 0xff));
  out.put(static_cast<char>((header.size() >> 8) & 0xff));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(rows * cols * sizeof(float)));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

fs::path VocabPath(const fs::path& emissions_path) {
  return fs::path(emissions_path.string() + ".vocab");
}

std::vector<std::string> ReadVocab(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::string> vocab;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    line = StripCr(std::move(line));
    if (header && line.size() > 1 && line[0] == '#') continue;
    header = false;
    if (line.empty()) {
      throw Error(ErrorCode::kShapeMismatch,
                  Where(path) + "empty symbol on line " + std::to_string(vocab.size() + 1));
    }
    vocab.push_back(std::move(line));
  }
  return vocab;
}

void WriteVocab(const fs::path& path, const std::vector<std::string>& vocab) {
  std::ofstream out = OpenOut(path);
  out << kVocabComment << '\n';
  for (const std::string& symbol : vocab) {
    if (symbol.empty() || symbol.find('\n') != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "vocabulary symbols must be non-empty lines");
    }
    out << symbol << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

EmissionMatrix ReadEmissions(const fs::path& path) {
  NpyArray array = ReadNpy(path);
  std::vector<std::string> vocab = ReadVocab(VocabPath(path));
  if (vocab.size() != array.cols) {
    throw Error(ErrorCode::kShapeMismatch,
                Where(path) + std::to_string(array.cols) + " columns but " +
                    std::to_string(vocab.size()) + " vocabulary symbols");
  }
  try {
    return EmissionMatrix(std::move(array.data), array.rows, std::move(vocab));
  } catch (const Error& e) {
    throw Error(e.code(), Where(path) + e.what());
  }
}

void WriteEmissions(const EmissionMatrix& matrix, const fs::path& path) {
  WriteNpy(path, matrix.data().data(), matrix.frames(), matrix.symbols());
  WriteVocab(VocabPath(path), matrix.vocab());
}

DatasetManifest LoadManifest(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(std::move(line));
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string at = Where(path) + "line " + std::to_string(line_no) + ": ";
    json item;
    try {
      item = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, at + "invalid JSON (" + e.what() + ")");
    }
    if (!item.is_object()) {
      throw Error(ErrorCode::kInvalidArgument, at + "expected a JSON object");
    }
    for (const char* key : {"id", "emissions"}) {
      if (!item.contains(key) || !item[key].is_string()) {
        throw Error(ErrorCode::kMissingField,
                    at + "missing string field \"" + std::string(key) + "\"");
      }
    }
    ManifestItem entry;
    entry.id = item["id"].get<std::string>();
    if (!ids.insert(entry.id).second) {
      throw Error(ErrorCode::kDuplicateId, at + "duplicate id '" + entry.id + "'");
    }
    entry.emissions = base / item["emissions"].get<std::string>();
    if (item.contains("reference") && !item["reference"].is_null()) {
      if (!item["reference"].is_string()) {
        throw Error(ErrorCode::kMissingField, at + "\"reference\" must be a string");
      }
      std::string reference = item["reference"].get<std::string>();
      if (!reference.empty() && reference[0] == '@') {
        std::string text = ReadFile(base / reference.substr(1));
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        reference = std::move(text);
      }
      entry.reference = std::move(reference);
    }
    manifest.push_back(std::move(entry));
  }
  return manifest;
}

void WriteManifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out = OpenOut(path);
  const fs::path base = path.parent_path();
  for (const ManifestItem& item : manifest) {
    json line = {{"id", item.id}, {"emissions", RelativeTo(item.emissions, base)}};
    if (item.reference) line["reference"] = *item.reference;
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::vector<HypothesisRecord> ReadHypotheses(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<HypothesisRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(std::move(line));
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string at = Where(path) + "line " + std::to_string(line_no) + ": ";
    json item;
    try {
      item = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument, at + "invalid JSON (" + e.what() + ")");
    }
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw Error(ErrorCode::kMissingField, at + "missing string field \"id\"");
    }
    HypothesisRecord record;
    record.id = item["id"].get<std::string>();
    if (item.contains("warning") && item["warning"].is_string()) {
      record.warning = item["warning"].get<std::string>();
    }
    if (item.contains("error") && item["error"].is_string()) {
      record.error = item["error"].get<std::string>();
    } else if (!item.contains("text") || !item["text"].is_string()) {
      throw Error(ErrorCode::kMissingField, at + "missing string field \"text\"");
    }
    if (item.contains("text") && item["text"].is_string()) {
      record.text = item["text"].get<std::string>();
    }
    const auto number = [&](const char* key) {
      if (!item.contains(key) || !item[key].is_number()) {
        return -std::numeric_limits<double>::infinity();
      }
      return item[key].get<double>();
    };
    record.score = number("score");
    record.seconds = item.contains("seconds") && item["seconds"].is_number()
                         ? item["seconds"].get<double>()
                         : 0.0;
    if (item.contains("nbest") && item["nbest"].is_array()) {
      for (const json& entry : item["nbest"]) {
        if (!entry.is_object() || !entry.contains("text") || !entry["text"].is_string()) {
          throw Error(ErrorCode::kMissingField, at + "n-best entry without \"text\"");
        }
        const double score = entry.contains("score") && entry["score"].is_number()
                                 ? entry["score"].get<double>()
                                 : -std::numeric_limits<double>::infinity();
        record.nbest.push_back({entry["text"].get<std::string>(), score});
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

void WriteHypotheses(const fs::path& path, const std::vector<HypothesisRecord>& records) {
  std::ofstream out = OpenOut(path);
  WriteHypotheses(out, records);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void WriteHypotheses(std::ostream& out, const std::vector<HypothesisRecord>& records) {
  for (const HypothesisRecord& record : records) {
    json line = {{"id", record.id}, {"text", record.text}};
    // JSON has no infinities; an impossible score is written as null.
    if (std::isfinite(record.score)) {
      line["score"] = record.score;
    } else {
      line["score"] = nullptr;
    }
    line["seconds"] = record.seconds;
    if (record.error) line["error"] = *record.error;
    if (record.warning) line["warning"] = *record.warning;
    if (record.nbest.size() > 1) {
      json list = json::array();
      for (const ScoredText& entry : record.nbest) {
        json item = {{"text", entry.text}};
        if (std::isfinite(entry.score)) {
          item["score"] = entry.score;
        } else {
          item["score"] = nullptr;
        }
        list.push_back(item);
      }
      line["nbest"] = list;
    }
    out << line.dump() << '\n';
  }
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream in = OpenIn(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(StripCr(std::move(line)));
  return lines;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in = OpenIn(path, true);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out = OpenOut(path, true);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace htrlm
