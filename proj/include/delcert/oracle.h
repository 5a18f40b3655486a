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

// Exact smoothed scores by exhaustive mask enumeration, and end-to-end
// validation of the pairwise bounds against them.

#ifndef DELCERT_ORACLE_H_
#define DELCERT_ORACLE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/classifiers.h"
#include "delcert/core.h"
#include "delcert/mechanism.h"
#include "json.hpp"

namespace delcert {

// Longest input ExactSmoothedScores accepts (2^22 masks).
inline constexpr int kMaxExactLength = 22;

struct ExactScores {
  std::vector<double> probabilities;  // indexed by class
  double rate = 0.0;
};

absl::StatusOr<ExactScores> ExactSmoothedScores(const BaseClassifier& base,
                                                const TokenSequence& x,
                                                double rate);

// Deletion rate as an arbitrary function of the input.
using RateFunction = std::function<double(const TokenSequence&)>;
RateFunction PolicyRate(DeletionPolicy policy);

// A random label table: each sequence gets class 0 with probability
// `p_first`, otherwise a uniform class from 1..num_classes-1, keyed by a
// seeded digest of the sequence.
std::unique_ptr<BaseClassifier> MakeRandomTableClassifier(uint64_t seed,
                                                          int num_classes,
                                                          double p_first);

struct BoundCheck {
  TokenSequence neighbor;
  int label = 0;
  int lcs = 0;
  double psi_p = 0.0;
  double mu = 0.0;     // exact score of `label` at x
  double exact = 0.0;  // exact score of `label` at the neighbour
  double lb = 0.0;
  double ub = 1.0;
  double envelope_lb = 0.0;
  double envelope_ub = 1.0;

  bool ok(double slack) const;
  nlohmann::ordered_json ToJson() const;
};

struct ValidationReport {
  TokenSequence x;
  double psi = 0.0;
  double slack = 1e-10;
  std::vector<BoundCheck> checks;

  int violations() const;
  // Smallest exact - lb and ub - exact seen (negative on violation).
  double min_lb_margin() const;
  double min_ub_margin() const;
};

struct ValidationOptions {
  double slack = 1e-10;
  // Added to every lower bound before checking. Test hook for negative
  // controls; leave at 0.
  double lb_offset = 0.0;
  size_t ball_cap = kDefaultBallCap;
};

// Checks lb <= exact p_y(x') <= ub for every class y and every x' within
// distance r of x, using the true LCS. The LCS envelopes are checked too.
absl::StatusOr<ValidationReport> ValidateBounds(
    const BaseClassifier& base, const TokenSequence& x, const RateFunction& rate,
    EditOps ops, int r, int vocab_size,
    const ValidationOptions& options = ValidationOptions());

}  // namespace delcert

#endif  // DELCERT_ORACLE_H_
