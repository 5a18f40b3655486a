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

// Evaluation metrics over certification records: certified-accuracy curves,
// summary statistics, length-quartile breakdowns and a standardized
// Wasserstein distance.

#ifndef DELCERT_REPORT_H_
#define DELCERT_REPORT_H_

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/certification.h"
#include "json.hpp"

namespace delcert {

enum class CurveMode { kRadius, kLogCardinality };

using Curve = std::vector<std::pair<double, double>>;  // (threshold, accuracy)

// Fraction of records that are correct with metric >= c, for each threshold c.
absl::StatusOr<Curve> CertifiedAccuracyCurve(std::span<const CertRecord> records,
                                             std::span<const double> thresholds,
                                             CurveMode mode);

// "threshold,accuracy" header followed by one row per point.
std::string CurveCsv(const Curve& curve);

// Linear-interpolated percentile (0..100) of an unsorted sample.
double Percentile(std::vector<double> values, double pct);

struct GroupStats {
  size_t count = 0;
  double clean_accuracy = 0.0;
  double mean_radius = 0.0;
  double mean_radius_se = 0.0;  // sample sd / sqrt(n); 0 for one record
  // Median log10 cardinality, or its first quartile when more than half of
  // the values are zero (then log_cc_is_q1 is set).
  double log_cc = 0.0;
  bool log_cc_is_q1 = false;
};

struct LengthQuartile {
  double length_low = 0.0;  // exclusive except for the first quartile
  double length_high = 0.0;
  GroupStats stats;
};

struct SummaryStats {
  GroupStats overall;
  std::vector<LengthQuartile> quartiles;

  nlohmann::ordered_json ToJson() const;
};

absl::StatusOr<SummaryStats> Summarize(std::span<const CertRecord> records);

// z-score both samples (population sd), sort, and average the absolute
// differences of matching order statistics.
absl::StatusOr<double> WassersteinStandardized(std::span<const double> a,
                                               std::span<const double> b);

// JSONL (de)serialisation of records.
std::string RecordsToJsonl(std::span<const CertRecord> records);
absl::StatusOr<std::vector<CertRecord>> RecordsFromJsonl(
    std::string_view text);

}  // namespace delcert

#endif  // DELCERT_REPORT_H_
