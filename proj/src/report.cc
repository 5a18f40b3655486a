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

#include "delcert/report.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace delcert {
namespace {

GroupStats Group(const std::vector<const CertRecord*>& recs) {
  GroupStats g;
  g.count = recs.size();
  if (recs.empty()) return g;
  const double n = static_cast<double>(recs.size());
  double correct = 0.0;
  double sum = 0.0;
  std::vector<double> log_cc;
  for (const CertRecord* r : recs) {
    correct += r->correct() ? 1.0 : 0.0;
    sum += r->radius;
    log_cc.push_back(r->log10_cc);
  }
  g.clean_accuracy = correct / n;
  g.mean_radius = sum / n;
  if (recs.size() > 1) {
    double ss = 0.0;
    for (const CertRecord* r : recs) {
      ss += (r->radius - g.mean_radius) * (r->radius - g.mean_radius);
    }
    g.mean_radius_se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  const auto zeros = std::count(log_cc.begin(), log_cc.end(), 0.0);
  g.log_cc_is_q1 = 2 * zeros > static_cast<long>(log_cc.size());
  g.log_cc = Percentile(std::move(log_cc), g.log_cc_is_q1 ? 25.0 : 50.0);
  return g;
}

nlohmann::ordered_json GroupJson(const GroupStats& g) {
  nlohmann::ordered_json j;
  j["count"] = g.count;
  j["clean_accuracy"] = g.clean_accuracy;
  j["mean_radius"] = g.mean_radius;
  j["mean_radius_se"] = g.mean_radius_se;
  j[g.log_cc_is_q1 ? "q1_log10_cc" : "median_log10_cc"] = g.log_cc;
  j["log10_cc_is_q1"] = g.log_cc_is_q1;
  return j;
}

}  // namespace

absl::StatusOr<Curve> CertifiedAccuracyCurve(std::span<const CertRecord> records,
                                             std::span<const double> thresholds,
                                             CurveMode mode) {
  if (records.empty()) return absl::InvalidArgumentError("no records");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    return absl::InvalidArgumentError("thresholds must be ascending");
  }
  Curve curve;
  const double n = static_cast<double>(records.size());
  for (double c : thresholds) {
    const auto hits = std::count_if(
        records.begin(), records.end(), [&](const CertRecord& r) {
          const double metric =
              mode == CurveMode::kRadius ? r.radius : r.log10_cc;
          return r.correct() && metric >= c;
        });
    curve.emplace_back(c, hits / n);
  }
  return curve;
}

std::string CurveCsv(const Curve& curve) {
  std::string out = "threshold,accuracy\n";
  for (const auto& [t, a] : curve) {
    absl::StrAppendFormat(&out, "%.17g,%.17g\n", t, a);
  }
  return out;
}

double Percentile(std::vector<double> values, double pct) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * (values.size() - 1);
  const size_t i = static_cast<size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - i;
  return values[i] + frac * (values[i + 1] - values[i]);
}

nlohmann::ordered_json SummaryStats::ToJson() const {
  nlohmann::ordered_json j = GroupJson(overall);
  nlohmann::ordered_json qs = nlohmann::ordered_json::array();
  for (const auto& q : quartiles) {
    nlohmann::ordered_json e;
    e["length_low"] = q.length_low;
    e["length_high"] = q.length_high;
    e.update(GroupJson(q.stats));
    qs.push_back(std::move(e));
  }
  j["length_quartiles"] = std::move(qs);
  return j;
}

absl::StatusOr<SummaryStats> Summarize(std::span<const CertRecord> records) {
  if (records.empty()) return absl::InvalidArgumentError("no records");
  std::vector<const CertRecord*> all;
  std::vector<double> lengths;
  for (const auto& r : records) {
    all.push_back(&r);
    lengths.push_back(static_cast<double>(r.length));
  }
  SummaryStats s;
  s.overall = Group(all);

  const double edges[5] = {
      *std::min_element(lengths.begin(), lengths.end()),
      Percentile(lengths, 25.0), Percentile(lengths, 50.0),
      Percentile(lengths, 75.0),
      *std::max_element(lengths.begin(), lengths.end())};
  for (int q = 0; q < 4; ++q) {
    std::vector<const CertRecord*> members;
    for (const CertRecord* r : all) {
      const double len = static_cast<double>(r->length);
      const bool above = q == 0 ? len >= edges[0] : len > edges[q];
      if (above && len <= edges[q + 1]) members.push_back(r);
    }
    s.quartiles.push_back({edges[q], edges[q + 1], Group(members)});
  }
  return s;
}

absl::StatusOr<double> WassersteinStandardized(std::span<const double> a,
                                               std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError("samples must have equal size");
  }
  if (a.size() < 2) return absl::InvalidArgumentError("need >= 2 values");
  const auto standardize =
      [](std::span<const double> v) -> absl::StatusOr<std::vector<double>> {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0)) {
      return absl::InvalidArgumentError("sample has zero variance");
    }
    std::vector<double> z;
    for (double x : v) z.push_back((x - mean) / sd);
    std::sort(z.begin(), z.end());
    return z;
  };
  auto za = standardize(a);
  if (!za.ok()) return za.status();
  auto zb = standardize(b);
  if (!zb.ok()) return zb.status();
  double sum = 0.0;
  for (size_t i = 0; i < za->size(); ++i) sum += std::abs((*za)[i] - (*zb)[i]);
  return sum / static_cast<double>(za->size());
}

std::string RecordsToJsonl(std::span<const CertRecord> records) {
  std::string out;
  for (const auto& r : records) absl::StrAppend(&out, r.ToJson().dump(), "\n");
  return out;
}

absl::StatusOr<std::vector<CertRecord>> RecordsFromJsonl(
    std::string_view text) {
  std::vector<CertRecord> records;
  int lineno = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == absl::string_view::npos) continue;
    auto j = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded()) {
      return absl::DataLossError(absl::StrCat("line ", lineno, ": bad JSON"));
    }
    auto rec = CertRecord::FromJson(j);
    if (!rec.ok()) {
      return absl::DataLossError(
          absl::StrCat("line ", lineno, ": ", rec.status().message()));
    }
    records.push_back(*rec);
  }
  return records;
}

}  // namespace delcert
