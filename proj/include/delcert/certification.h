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

// Edit-distance certification of deletion-smoothed classifiers.
//
// Two certifiers share one acceptance rule: radius r is certified when, for
// every neighbour at distance 1..r, the lower bound on the predicted class
// stays strictly above the upper bound on the runner-up. CertifyRadius
// reasons over edit compositions and the worst-case common subsequence they
// allow; CertifyGeneral enumerates the actual ball and is limited to small
// inputs.

#ifndef DELCERT_CERTIFICATION_H_
#define DELCERT_CERTIFICATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/bounds.h"
#include "delcert/classifiers.h"
#include "delcert/core.h"
#include "delcert/mechanism.h"
#include "delcert/random.h"
#include "json.hpp"

namespace delcert {

struct EditComposition {
  int n_del = 0;
  int n_ins = 0;
  int n_sub = 0;

  int total() const { return n_del + n_ins + n_sub; }
  bool operator==(const EditComposition&) const = default;
};

// All (n_del, n_ins, n_sub) summing to r with disabled ops at zero, in
// descending lexicographic order.
std::vector<EditComposition> EditCompositions(EditOps ops, int r);

// Geometry of the hardest neighbour reachable with exactly this composition:
// |x'| = |x| + n_ins - n_del and common subsequence |x| - n_del - n_sub.
// nullopt when the composition cannot be applied to a sequence of length
// len_x.
absl::StatusOr<std::optional<PairwiseGeometry>> WorstCaseGeometry(
    int len_x, const EditComposition& comp, const DeletionPolicy& policy);

// Largest radius in [0, r_max] certified by the given score bounds, using the
// composition reduction. nullopt (abstain) when t1_lb <= t2_ub. The policy
// must depend on the input only through its length.
absl::StatusOr<std::optional<int>> CertifyRadius(
    double t1_lb, double t2_ub, int len_x, const DeletionPolicy& policy,
    EditOps ops, int r_max);

// Same acceptance rule, checked against every sequence of the edit ball.
absl::StatusOr<std::optional<int>> CertifyGeneral(
    double t1_lb, double t2_ub, const TokenSequence& x,
    const DeletionPolicy& policy, EditOps ops, int vocab_size, int r_max,
    size_t ball_cap = kDefaultBallCap);

// CertifyGeneral driven by exact (or externally estimated) class scores at
// x; the predicted class is the highest score, lowest label on ties.
absl::StatusOr<std::optional<int>> CertifyGeneralFromScores(
    std::span<const double> scores, const TokenSequence& x,
    const DeletionPolicy& policy, EditOps ops, int vocab_size, int r_max,
    size_t ball_cap = kDefaultBallCap);

// log10 of a lower bound on |B_r(x; ops)| for any x of length len_x: the
// largest of the enabled single-operation families (j <= r substitutions,
// r insertions at one position, up to r deletions from the end).
double RegionLogCardinality(int len_x, int r, EditOps ops, int vocab_size);

struct Certificate {
  std::optional<int> radius;  // nullopt: abstain
  EditOps ops;
  double alpha = 0.05;
  double log10_cardinality = 0.0;
  double t1_lb = 0.0;
  double t2_ub = 1.0;

  int reported_radius() const { return radius.value_or(0); }
};

struct CertifyOptions {
  EditOps ops;
  double alpha = 0.05;
  int64_t n_pred = 1000;
  int64_t n_cert = 4000;
  std::optional<int> r_max;  // defaults to |x|
  int vocab_size = 2;
};

struct CertifyResult {
  int label = 0;
  Certificate certificate;
};

// Predict, estimate bounds from an independent batch, then CertifyRadius.
// Abstains when the two batches disagree on the top class.
absl::StatusOr<CertifyResult> Certify(const BaseClassifier& base,
                                      const TokenSequence& x,
                                      const DeletionPolicy& policy,
                                      const CertifyOptions& options,
                                      BitGen& prediction_gen,
                                      BitGen& certification_gen);

// One JSONL line of certification output. Misclassified inputs carry
// radius = log10_cc = 0.
struct CertRecord {
  int64_t index = 0;
  int true_label = 0;
  int predicted_label = 0;
  int radius = 0;
  double log10_cc = 0.0;
  double t1_lb = 0.0;
  double t2_ub = 0.0;
  int64_t length = 0;
  double seconds = 0.0;

  bool correct() const { return true_label == predicted_label; }

  static CertRecord FromResult(int64_t index, int true_label,
                               int64_t length, const CertifyResult& result,
                               double seconds);
  nlohmann::ordered_json ToJson() const;
  static absl::StatusOr<CertRecord> FromJson(const nlohmann::json& j);
};

}  // namespace delcert

#endif  // DELCERT_CERTIFICATION_H_
