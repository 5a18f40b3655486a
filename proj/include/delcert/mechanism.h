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

// The variable-rate deletion mechanism: deletion-rate policies, mask sampling,
// mask application and mask probability mass.

#ifndef DELCERT_MECHANISM_H_
#define DELCERT_MECHANISM_H_

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/core.h"
#include "delcert/random.h"
#include "json.hpp"

namespace delcert {

// Constant per-token deletion probability.
struct FixedRate {
  double p_del = 0.0;
};

// max(p_lb, p * (1 - k / |x|)).
struct LengthDependentRate {
  double p_lb = 0.0;
  double p = 1.0;
  int k = 1;
};

// Per-bin expected retained length: rate = max(0, 1 - K[g] / |x|) where g is
// the bin [boundaries[g], boundaries[g+1]) containing |x|. The first boundary
// is 0 and the last is +infinity.
struct BinnedRate {
  std::vector<double> boundaries;
  std::vector<double> expected_lengths;

  size_t BinIndex(size_t length) const;
};

class DeletionPolicy {
 public:
  using Params = std::variant<FixedRate, LengthDependentRate, BinnedRate>;

  static absl::StatusOr<DeletionPolicy> Fixed(double p_del);
  static absl::StatusOr<DeletionPolicy> LengthDependent(double p_lb, double p,
                                                        int k);
  static absl::StatusOr<DeletionPolicy> Binned(
      std::vector<double> boundaries, std::vector<double> expected_lengths);

  // The length-dependent default: p = 1, p_lb = p_del and
  // k = floor((1 - p_del) * mean_length), so a sequence of average length is
  // smoothed at exactly p_del.
  static absl::StatusOr<DeletionPolicy> AdaptDel(double p_del,
                                                 double mean_length);

  static absl::StatusOr<DeletionPolicy> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;

  // Per-token deletion probability for a sequence of the given length.
  // Length 0 is rejected for the length-dependent kinds.
  absl::StatusOr<double> Rate(size_t length) const;

  const Params& params() const { return params_; }

 private:
  explicit DeletionPolicy(Params params) : params_(std::move(params)) {}
  Params params_;
};

// bits[i] == 1 retains token i.
class DeletionMask {
 public:
  DeletionMask() = default;
  explicit DeletionMask(std::vector<uint8_t> bits);

  const std::vector<uint8_t>& bits() const { return bits_; }
  size_t size() const { return bits_.size(); }
  size_t retained_count() const { return retained_; }
  size_t deleted_count() const { return bits_.size() - retained_; }

  // Mask whose bit i is bit i of `pattern` (length <= 64).
  static DeletionMask FromBits(uint64_t pattern, size_t length);

 private:
  std::vector<uint8_t> bits_;
  size_t retained_ = 0;
};

// Each token deleted independently with probability `rate`.
DeletionMask SampleMask(double rate, size_t length, BitGen& gen);

// Samples a mask and applies it in one pass.
TokenSequence SampleDeletion(const TokenSequence& x, double rate, BitGen& gen);

absl::StatusOr<TokenSequence> ApplyMask(const TokenSequence& x,
                                        const DeletionMask& mask);

// rate^{#deleted} * (1 - rate)^{#retained}.
double MaskPmf(const DeletionMask& mask, double rate);

}  // namespace delcert

#endif  // DELCERT_MECHANISM_H_
