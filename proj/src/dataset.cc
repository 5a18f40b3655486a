// Copyright 2026 The delcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "delcert/dataset.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace delcert {

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name) {
  if (name == "auto" || name == "jsonl") return DatasetFormat::kAuto;
  if (name == "text") return DatasetFormat::kText;
  if (name == "tokens") return DatasetFormat::kTokens;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset format '", std::string(name), "'"));
}

double Dataset::MeanLength() const {
  if (examples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : examples) sum += static_cast<double>(e.tokens.size());
  return sum / static_cast<double>(examples.size());
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return absl::DataLossError(absl::StrCat("read failed: ", path));
  return ss.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<Dataset> LoadDataset(const std::string& path,
                                    DatasetFormat format, Vocabulary vocab) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();

  Dataset ds;
  ds.vocab = std::move(vocab);
  int max_token = -1;
  std::istringstream lines(*contents);
  std::string line;
  for (int lineno = 1; std::getline(lines, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = [&] { return absl::StrCat(path, ":", lineno, ": "); };
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::DataLossError(absl::StrCat(where(), "not a JSON object"));
    }
    if (!j.contains("label") || !j["label"].is_number_integer() ||
        j["label"].get<int>() < 0) {
      return absl::DataLossError(
          absl::StrCat(where(), "missing non-negative integer label"));
    }
    Example ex;
    ex.label = j["label"].get<int>();
    const bool has_text = j.contains("text");
    const bool has_tokens = j.contains("tokens");
    const bool use_text =
        format == DatasetFormat::kText ||
        (format == DatasetFormat::kAuto && has_text && !has_tokens);
    if (use_text) {
      if (!has_text || !j["text"].is_string()) {
        return absl::DataLossError(absl::StrCat(where(), "missing text"));
      }
      ex.tokens = ds.vocab.Tokenize(j["text"].get<std::string>());
    } else {
      if (!has_tokens) {
        return absl::DataLossError(absl::StrCat(where(), "missing tokens"));
      }
      auto seq = SequenceFromJson(j["tokens"]);
      if (!seq.ok()) {
        return absl::DataLossError(
            absl::StrCat(where(), seq.status().message()));
      }
      ex.tokens = *std::move(seq);
      for (Token t : ex.tokens) max_token = std::max<int>(max_token, t);
    }
    ds.examples.push_back(std::move(ex));
  }
  if (max_token >= ds.vocab.size()) {
    if (ds.vocab.has_table()) {
      return absl::DataLossError("token id outside the loaded vocabulary");
    }
    ds.vocab = Vocabulary(max_token + 1);
  }
  return ds;
}

absl::StatusOr<Vocabulary> LoadVocabulary(const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  nlohmann::json j = nlohmann::json::parse(*contents, nullptr, false);
  if (j.is_discarded()) {
    return absl::DataLossError(absl::StrCat(path, ": invalid JSON"));
  }
  return Vocabulary::FromJson(j);
}

absl::Status SaveVocabulary(const Vocabulary& vocab, const std::string& path) {
  return WriteFile(path, vocab.ToJson().dump(1) + "\n");
}

}  // namespace delcert
