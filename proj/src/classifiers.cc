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

#include "delcert/classifiers.h"

#include <algorithm>
#include <charconv>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace delcert {
namespace {

absl::Status CheckBatch(std::span<const TokenSequence> batch) {
  if (batch.empty()) return absl::InvalidArgumentError("empty batch");
  return absl::OkStatus();
}

template <typename T>
absl::StatusOr<T> ParseNumber(absl::string_view s, absl::string_view what) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad ", what, " in classifier spec: '", s, "'"));
  }
  return value;
}

}  // namespace

absl::StatusOr<std::vector<int>> ConstantClassifier::ClassifyBatch(
    std::span<const TokenSequence> batch) const {
  if (auto s = CheckBatch(batch); !s.ok()) return s;
  return std::vector<int>(batch.size(), label_);
}

std::string ConstantClassifier::name() const {
  return absl::StrCat("constant:", label_, ":", num_classes_);
}

absl::StatusOr<std::vector<int>> KeywordClassifier::ClassifyBatch(
    std::span<const TokenSequence> batch) const {
  if (auto s = CheckBatch(batch); !s.ok()) return s;
  std::vector<int> labels;
  labels.reserve(batch.size());
  for (const auto& x : batch) {
    const auto hits = std::count_if(
        x.begin(), x.end(), [&](Token t) { return keywords_.contains(t); });
    labels.push_back(hits >= threshold_ ? 1 : 0);
  }
  return labels;
}

std::string KeywordClassifier::name() const {
  return absl::StrCat("keyword:", absl::StrJoin(keywords_, ","), ":",
                      threshold_);
}

absl::StatusOr<std::vector<int>> HashClassifier::ClassifyBatch(
    std::span<const TokenSequence> batch) const {
  if (auto s = CheckBatch(batch); !s.ok()) return s;
  std::vector<int> labels;
  labels.reserve(batch.size());
  for (const auto& x : batch) {
    labels.push_back(static_cast<int>(SequenceDigest(x, seed_) %
                                      static_cast<uint64_t>(num_classes_)));
  }
  return labels;
}

std::string HashClassifier::name() const {
  return absl::StrCat("hash:", seed_, ":", num_classes_);
}

absl::StatusOr<std::vector<int>> FunctionClassifier::ClassifyBatch(
    std::span<const TokenSequence> batch) const {
  if (auto s = CheckBatch(batch); !s.ok()) return s;
  std::vector<int> labels;
  labels.reserve(batch.size());
  for (const auto& x : batch) {
    const int label = fn_(x);
    if (label < 0 || label >= num_classes_) {
      return absl::InternalError(
          absl::StrCat(name_, " returned out-of-range label ", label));
    }
    labels.push_back(label);
  }
  return labels;
}

absl::StatusOr<std::unique_ptr<BaseClassifier>> MakeBuiltinClassifier(
    std::string_view spec, const Vocabulary* vocab) {
  const std::vector<absl::string_view> parts =
      absl::StrSplit(absl::string_view(spec.data(), spec.size()), ':');
  const absl::string_view kind = parts[0];

  if (kind == "constant") {
    if (parts.size() < 2 || parts.size() > 3) {
      return absl::InvalidArgumentError("expected constant:LABEL[:CLASSES]");
    }
    auto label = ParseNumber<int>(parts[1], "label");
    if (!label.ok()) return label.status();
    int classes = std::max(2, *label + 1);
    if (parts.size() == 3) {
      auto c = ParseNumber<int>(parts[2], "class count");
      if (!c.ok()) return c.status();
      classes = *c;
    }
    if (*label < 0 || *label >= classes) {
      return absl::InvalidArgumentError("constant label out of range");
    }
    return std::make_unique<ConstantClassifier>(*label, classes);
  }

  if (kind == "keyword") {
    if (parts.size() < 2 || parts.size() > 3 || parts[1].empty()) {
      return absl::InvalidArgumentError(
          "expected keyword:TOK[,TOK...][:THRESHOLD]");
    }
    std::set<Token> keywords;
    for (absl::string_view tok : absl::StrSplit(parts[1], ',')) {
      if (auto id = ParseNumber<Token>(tok, "token"); id.ok()) {
        keywords.insert(*id);
        continue;
      }
      std::optional<Token> id;
      if (vocab != nullptr) id = vocab->Find(std::string(tok));
      if (!id.has_value()) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown keyword '", tok, "'"));
      }
      keywords.insert(*id);
    }
    int threshold = 1;
    if (parts.size() == 3) {
      auto t = ParseNumber<int>(parts[2], "threshold");
      if (!t.ok()) return t.status();
      threshold = *t;
    }
    if (threshold < 1) {
      return absl::InvalidArgumentError("keyword threshold must be >= 1");
    }
    return std::make_unique<KeywordClassifier>(std::move(keywords), threshold);
  }

  if (kind == "hash") {
    if (parts.size() != 3) {
      return absl::InvalidArgumentError("expected hash:SEED:CLASSES");
    }
    auto seed = ParseNumber<uint64_t>(parts[1], "seed");
    if (!seed.ok()) return seed.status();
    auto classes = ParseNumber<int>(parts[2], "class count");
    if (!classes.ok()) return classes.status();
    if (*classes < 1) return absl::InvalidArgumentError("need >= 1 class");
    return std::make_unique<HashClassifier>(*seed, *classes);
  }

  return absl::InvalidArgumentError(
      absl::StrCat("unknown classifier kind '", kind, "'"));
}

}  // namespace delcert
