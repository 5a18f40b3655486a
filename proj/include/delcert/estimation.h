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

// Monte Carlo estimation of smoothed class probabilities and exact
// Clopper-Pearson confidence bounds.

#ifndef DELCERT_ESTIMATION_H_
#define DELCERT_ESTIMATION_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/classifiers.h"
#include "delcert/core.h"
#include "delcert/mechanism.h"
#include "delcert/random.h"

namespace delcert {


struct ScoreEstimate {
  std::vector<int64_t> class_counts;
  int64_t total = 0;
  double alpha = 0.05;

  // Most frequent label; ties go to the lowest label.
  int Plurality() const;
};

// P[X >= k] for X ~ Binomial(n, p).
double BinomialSurvival(int64_t n, double p, int64_t k);

// One-sided lower confidence bound at level 1 - alpha: the p at which
// P[X >= successes] = alpha, found by bisection to 1e-12 and rounded down.
// 0 when successes = 0.
absl::StatusOr<double> ClopperPearsonLb(int64_t successes, int64_t total,
                                        double alpha);
// 1 - ClopperPearsonLb(total - successes, total, alpha).
absl::StatusOr<double> ClopperPearsonUb(int64_t successes, int64_t total,
                                        double alpha);

// Deletion rate used to smooth a sequence of the given length. The empty
// sequence has nothing to delete and is smoothed at rate 0.
absl::StatusOr<double> SmoothingRate(const DeletionPolicy& policy,
                                     size_t length);

// Class counts of the base classifier over n randomly deleted copies of x.
absl::StatusOr<ScoreEstimate> SampleCounts(const BaseClassifier& base,
                                           const TokenSequence& x, double rate,
                                           int64_t n, BitGen& gen);

struct Prediction {
  int label = 0;
  ScoreEstimate estimate;
};

// Plurality vote over n_pred samples.
absl::StatusOr<Prediction> Predict(const BaseClassifier& base,
                                   const TokenSequence& x,
                                   const DeletionPolicy& policy,
                                   int64_t n_pred, BitGen& gen);

struct CertBounds {
  double t1_lb = 0.0;  // lower bound on p_{y1}(x)
  double t2_ub = 1.0;  // upper bound on max_{y != y1} p_y(x)
  // The certification batch's plurality differs from y1.
  bool disagreement = false;
  ScoreEstimate estimate;
};

// Draws a fresh batch of n_cert samples and bounds the top two classes, each
// at level alpha / 2.
absl::StatusOr<CertBounds> EstimateCertBounds(const BaseClassifier& base,
                                              const TokenSequence& x,
                                              const DeletionPolicy& policy,
                                              int y1, int64_t n_cert,
                                              double alpha, BitGen& gen);

}  // namespace delcert

#endif  // DELCERT_ESTIMATION_H_
