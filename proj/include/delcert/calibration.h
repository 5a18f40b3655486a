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

// Calibration of per-bin expected retained lengths: equal-width length bins,
// certified accuracy at a fixed expected length, and golden-section search.

#ifndef DELCERT_CALIBRATION_H_
#define DELCERT_CALIBRATION_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/classifiers.h"
#include "delcert/core.h"
#include "delcert/dataset.h"
#include "delcert/mechanism.h"
#include "json.hpp"

namespace delcert {

struct BinSpec {
  std::vector<double> boundaries;  // 0, interior edges..., +inf
  int min_count = 1;
  double outlier_pct = 1.0;

  size_t num_bins() const { return boundaries.size() - 1; }
};

// Drops lengths outside the [outlier_pct, 100 - outlier_pct] percentiles,
// then looks for the largest k <= min(20, ceil(sqrt(n))) whose k equal-width
// bins over the remaining range each hold at least min_count lengths.
absl::StatusOr<BinSpec> CreateBins(std::span<const int64_t> lengths,
                                   int min_count, double outlier_pct = 1.0);

// Golden-section search for the maximiser of `objective` on [low, high].
// Both probes are re-evaluated every iteration, so a noisy objective sees a
// consistent comparison. Stops once high - low <= tol and returns the
// midpoint. `brackets`, when given, receives every bracket visited.
inline constexpr double kGoldenSection = 0.3819660112501051;  // (3 - sqrt 5)/2

template <typename Objective>
double GoldenSectionMaximize(
    double low, double high, double tol, Objective&& objective,
    std::vector<std::pair<double, double>>* brackets = nullptr) {
  if (brackets != nullptr) brackets->emplace_back(low, high);
  while (high - low > tol) {
    const double m1 = low + kGoldenSection * (high - low);
    const double m2 = high - kGoldenSection * (high - low);
    if (objective(m1) > objective(m2)) {
      high = m2;
    } else {
      low = m1;
    }
    if (brackets != nullptr) brackets->emplace_back(low, high);
  }
  return 0.5 * (low + high);
}

struct CalibrationOptions {
  EditOps ops;
  double alpha = 0.05;
  int64_t n_pred = 32;
  int64_t n_cert = 256;
  int vocab_size = 2;
  double tau = 0.5;   // certified-accuracy target
  double tol = 1.0;   // golden-section stopping width
  int m = 100;        // inputs sampled per bin
  double p_lb = 0.9;  // sets the first bin's K = (1 - p_lb) * midpoint
  int workers = 1;
  uint64_t seed = 0;
};

struct RadiusAccuracy {
  int radius = 0;
  double accuracy = 0.0;
};

// Certifies every example at rate max(0, 1 - k / |x|) and returns the largest
// r with certified accuracy >= tau, with that accuracy. nullopt when even
// r = 0 misses tau. Randomness comes from (options.seed, stream_index).
absl::StatusOr<std::optional<RadiusAccuracy>> MaxCertRadius(
    const BaseClassifier& base, double k, std::span<const Example> data,
    const CalibrationOptions& options, uint64_t stream_index = 0);

struct BinDiagnostics {
  double low = 0.0;  // searched bracket
  double high = 0.0;
  double k = 0.0;
  bool optimized = false;
  std::optional<RadiusAccuracy> achieved;
  std::vector<std::pair<double, double>> brackets;
};

struct CalibrationResult {
  BinSpec bins;
  std::vector<double> expected_lengths;
  std::vector<BinDiagnostics> diagnostics;
  std::vector<std::string> warnings;

  absl::StatusOr<DeletionPolicy> ToPolicy() const;
  nlohmann::ordered_json DiagnosticsJson() const;
};

// Golden-section search per bin 1..n-1 over [0.01 g_{i+1}, 0.3 g_i], ranking
// probes by (radius, certified accuracy). The open last bin uses the longest
// observed length as its upper edge.
absl::StatusOr<CalibrationResult> OptimizeExpectedLengths(
    const BaseClassifier& base, std::span<const Example> data,
    const BinSpec& bins, const CalibrationOptions& options);

}  // namespace delcert

#endif  // DELCERT_CALIBRATION_H_
