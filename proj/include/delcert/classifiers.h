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

// Base classifiers: the interface the smoothing engine queries, plus small
// deterministic built-ins used by tests and demos.

#ifndef DELCERT_CLASSIFIERS_H_
#define DELCERT_CLASSIFIERS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/core.h"

namespace delcert {

// A deterministic map from token sequences (including the empty one) to
// labels in [0, num_classes). Implementations must be safe to call from
// several threads at once.
class BaseClassifier {
 public:
  virtual ~BaseClassifier() = default;

  // One label per input, in order. Empty batches are rejected.
  virtual absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const = 0;
  virtual int num_classes() const = 0;
  virtual std::string name() const = 0;
  // Batch size samplers should use. Results never depend on it.
  virtual size_t preferred_batch_size() const { return 1024; }
};

class ConstantClassifier : public BaseClassifier {
 public:
  ConstantClassifier(int label, int num_classes)
      : label_(label), num_classes_(num_classes) {}

  absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const override;
  int num_classes() const override { return num_classes_; }
  std::string name() const override;

 private:
  int label_;
  int num_classes_;
};

// Class 1 when at least `threshold` tokens of the input are keywords, else 0.
class KeywordClassifier : public BaseClassifier {
 public:
  KeywordClassifier(std::set<Token> keywords, int threshold = 1)
      : keywords_(std::move(keywords)), threshold_(threshold) {}

  absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const override;
  int num_classes() const override { return 2; }
  std::string name() const override;

 private:
  std::set<Token> keywords_;
  int threshold_;
};

// SequenceDigest(x, seed) mod num_classes: an irregular but reproducible
// decision surface.
class HashClassifier : public BaseClassifier {
 public:
  HashClassifier(uint64_t seed, int num_classes)
      : seed_(seed), num_classes_(num_classes) {}

  absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const override;
  int num_classes() const override { return num_classes_; }
  std::string name() const override;

 private:
  uint64_t seed_;
  int num_classes_;
};

// Wraps a plain function. The function must be pure.
class FunctionClassifier : public BaseClassifier {
 public:
  using Fn = std::function<int(const TokenSequence&)>;
  FunctionClassifier(Fn fn, int num_classes, std::string name = "function")
      : fn_(std::move(fn)), num_classes_(num_classes), name_(std::move(name)) {}

  absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const override;
  int num_classes() const override { return num_classes_; }
  std::string name() const override { return name_; }

 private:
  Fn fn_;
  int num_classes_;
  std::string name_;
};

// Builds a built-in classifier from a spec string:
//   constant:LABEL[:NUM_CLASSES]
//   keyword:TOK[,TOK...][:THRESHOLD]   (ids, or words looked up in `vocab`)
//   hash:SEED:NUM_CLASSES
absl::StatusOr<std::unique_ptr<BaseClassifier>> MakeBuiltinClassifier(
    std::string_view spec, const Vocabulary* vocab = nullptr);

}  // namespace delcert

#endif  // DELCERT_CLASSIFIERS_H_
