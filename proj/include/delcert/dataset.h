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

// Labelled sequence datasets stored as JSONL, one example per line:
//   {"text": "some words", "label": 1}   or   {"tokens": [3, 1, 4], "label": 0}

#ifndef DELCERT_DATASET_H_
#define DELCERT_DATASET_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "delcert/core.h"

namespace delcert {

struct Example {
  TokenSequence tokens;
  int label = 0;
};

enum class DatasetFormat { kAuto, kText, kTokens };

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name);

struct Dataset {
  std::vector<Example> examples;
  // Text datasets intern words here; token datasets size it to cover every
  // id seen.
  Vocabulary vocab;

  double MeanLength() const;
};

// Reads a JSONL dataset. Text lines are split on whitespace and interned into
// `vocab` (pass a loaded table to keep ids stable across runs). Blank lines
// are skipped.
absl::StatusOr<Dataset> LoadDataset(const std::string& path,
                                    DatasetFormat format,
                                    Vocabulary vocab = Vocabulary());

absl::StatusOr<Vocabulary> LoadVocabulary(const std::string& path);
absl::Status SaveVocabulary(const Vocabulary& vocab, const std::string& path);

// Whole-file helpers.
absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

}  // namespace delcert

#endif  // DELCERT_DATASET_H_
