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

#include "delcert/estimation.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace delcert {
namespace {

absl::Status CheckCounts(int64_t successes, int64_t total, double alpha) {
  if (total < 1 || successes < 0 || successes > total) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid counts: ", successes, " successes of ", total));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  return absl::OkStatus();
}

}  // namespace

int ScoreEstimate::Plurality() const {
  const auto it = std::max_element(class_counts.begin(), class_counts.end());
  return static_cast<int>(it - class_counts.begin());
}

double BinomialSurvival(int64_t n, double p, int64_t k) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  // log C(n, i), updated incrementally from i = k.
  double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0);
  double sum = 0.0;
  for (int64_t i = k; i <= n; ++i) {
    sum += std::exp(log_choose + i * log_p + (n - i) * log_q);
    log_choose += std::log(static_cast<double>(n - i)) - std::log(i + 1.0);
  }
  return std::min(sum, 1.0);
}

absl::StatusOr<double> ClopperPearsonLb(int64_t successes, int64_t total,
                                        double alpha) {
  if (auto s = CheckCounts(successes, total, alpha); !s.ok()) return s;
  if (successes == 0) return 0.0;
  if (successes == total) {
    return std::pow(alpha, 1.0 / static_cast<double>(total));
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (BinomialSurvival(total, mid, successes) > alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

absl::StatusOr<double> ClopperPearsonUb(int64_t successes, int64_t total,
                                        double alpha) {
  auto lb = ClopperPearsonLb(total - successes, total, alpha);
  if (!lb.ok()) return lb.status();
  return 1.0 - *lb;
}

absl::StatusOr<double> SmoothingRate(const DeletionPolicy& policy,
                                     size_t length) {
  if (length == 0) return 0.0;
  return policy.Rate(length);
}

absl::StatusOr<ScoreEstimate> SampleCounts(const BaseClassifier& base,
                                           const TokenSequence& x, double rate,
                                           int64_t n, BitGen& gen) {
  if (n < 1) return absl::InvalidArgumentError("sample count must be >= 1");
  ScoreEstimate est;
  est.class_counts.assign(base.num_classes(), 0);
  est.total = n;
  std::vector<TokenSequence> batch;
  const int64_t chunk =
      static_cast<int64_t>(std::max<size_t>(1, base.preferred_batch_size()));
  for (int64_t done = 0; done < n;) {
    const int64_t size = std::min<int64_t>(chunk, n - done);
    batch.clear();
    for (int64_t i = 0; i < size; ++i) {
      batch.push_back(SampleDeletion(x, rate, gen));
    }
    auto labels = base.ClassifyBatch(batch);
    if (!labels.ok()) return labels.status();
    if (labels->size() != batch.size()) {
      return absl::InternalError("classifier returned wrong label count");
    }
    for (int label : *labels) {
      if (label < 0 || label >= base.num_classes()) {
        return absl::InternalError(
            absl::StrCat("classifier returned out-of-range label ", label));
      }
      ++est.class_counts[label];
    }
    done += size;
  }
  return est;
}

absl::StatusOr<Prediction> Predict(const BaseClassifier& base,
                                   const TokenSequence& x,
                                   const DeletionPolicy& policy,
                                   int64_t n_pred, BitGen& gen) {
  auto rate = SmoothingRate(policy, x.size());
  if (!rate.ok()) return rate.status();
  auto est = SampleCounts(base, x, *rate, n_pred, gen);
  if (!est.ok()) return est.status();
  return Prediction{est->Plurality(), *std::move(est)};
}

absl::StatusOr<CertBounds> EstimateCertBounds(const BaseClassifier& base,
                                              const TokenSequence& x,
                                              const DeletionPolicy& policy,
                                              int y1, int64_t n_cert,
                                              double alpha, BitGen& gen) {
  if (y1 < 0 || y1 >= base.num_classes()) {
    return absl::InvalidArgumentError("predicted label out of range");
  }
  auto rate = SmoothingRate(policy, x.size());
  if (!rate.ok()) return rate.status();
  auto est = SampleCounts(base, x, *rate, n_cert, gen);
  if (!est.ok()) return est.status();
  est->alpha = alpha;

  CertBounds out;
  auto t1 = ClopperPearsonLb(est->class_counts[y1], n_cert, alpha / 2);
  if (!t1.ok()) return t1.status();
  out.t1_lb = *t1;
  out.t2_ub = 0.0;
  for (int y = 0; y < base.num_classes(); ++y) {
    if (y == y1) continue;
    auto ub = ClopperPearsonUb(est->class_counts[y], n_cert, alpha / 2);
    if (!ub.ok()) return ub.status();
    out.t2_ub = std::max(out.t2_ub, *ub);
  }
  out.disagreement = est->Plurality() != y1;
  out.estimate = *std::move(est);
  return out;
}

}  // namespace delcert
