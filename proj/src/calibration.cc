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

#include "delcert/calibration.h"

#include <algorithm>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "delcert/certification.h"
#include "delcert/parallel.h"
#include "delcert/random.h"

namespace delcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bin of v among [0, e_1), [e_1, e_2), ..., the same rule BinnedRate uses.
size_t EdgeBin(const std::vector<double>& edges, double v) {
  return static_cast<size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                             edges.begin());
}

}  // namespace

absl::StatusOr<BinSpec> CreateBins(std::span<const int64_t> lengths,
                                   int min_count, double outlier_pct) {
  if (lengths.empty()) return absl::InvalidArgumentError("no lengths to bin");
  if (min_count < 1) return absl::InvalidArgumentError("min_count must be >= 1");
  if (!(outlier_pct >= 0.0 && outlier_pct < 50.0)) {
    return absl::InvalidArgumentError("outlier_pct must lie in [0, 50)");
  }
  std::vector<int64_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const double q = outlier_pct / 100.0;
  const double lo = static_cast<double>(
      sorted[static_cast<size_t>(std::floor(q * (n - 1)))]);
  const double hi = static_cast<double>(
      sorted[static_cast<size_t>(std::ceil((1.0 - q) * (n - 1)))]);
  std::vector<double> kept;
  for (int64_t v : sorted) {
    if (v >= lo && v <= hi) kept.push_back(static_cast<double>(v));
  }

  BinSpec spec;
  spec.min_count = min_count;
  spec.outlier_pct = outlier_pct;
  int k = std::min(20, static_cast<int>(std::ceil(std::sqrt(kept.size()))));
  if (hi == lo) k = 1;
  for (; k >= 1; --k) {
    const double width = (hi - lo) / k;
    std::vector<double> edges;
    for (int j = 1; j < k; ++j) edges.push_back(lo + width * j);
    std::vector<int> counts(k, 0);
    for (double v : kept) ++counts[EdgeBin(edges, v)];
    if (*std::min_element(counts.begin(), counts.end()) >= min_count) {
      spec.boundaries.push_back(0.0);
      spec.boundaries.insert(spec.boundaries.end(), edges.begin(), edges.end());
      spec.boundaries.push_back(kInf);
      return spec;
    }
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "cannot satisfy threshold: no equal-width binning of ", kept.size(),
      " lengths puts ", min_count, " in every bin"));
}

absl::StatusOr<std::optional<RadiusAccuracy>> MaxCertRadius(
    const BaseClassifier& base, double k, std::span<const Example> data,
    const CalibrationOptions& options, uint64_t stream_index) {
  if (data.empty()) return absl::InvalidArgumentError("empty dataset");
  auto policy = DeletionPolicy::Binned({0.0, kInf}, {k});
  if (!policy.ok()) return policy.status();

  CertifyOptions copts;
  copts.ops = options.ops;
  copts.alpha = options.alpha;
  copts.n_pred = options.n_pred;
  copts.n_cert = options.n_cert;
  copts.vocab_size = options.vocab_size;

  // Radius of each correctly classified input, -1 otherwise.
  std::vector<int> radii(data.size(), -1);
  std::vector<absl::Status> errors(data.size());
  ParallelFor(data.size(), options.workers, [&](size_t i) {
    const uint64_t base_seed = options.seed + stream_index;
    BitGen pred = MakeStream(base_seed, Stream::kCalibration, 2 * i);
    BitGen cert = MakeStream(base_seed, Stream::kCalibration, 2 * i + 1);
    auto res = Certify(base, data[i].tokens, *policy, copts, pred, cert);
    if (!res.ok()) {
      errors[i] = res.status();
      return;
    }
    if (res->label == data[i].label) {
      radii[i] = res->certificate.reported_radius();
    }
  });
  for (const auto& s : errors) {
    if (!s.ok()) return s;
  }

  const double n = static_cast<double>(data.size());
  const auto accuracy = [&](int r) {
    return std::count_if(radii.begin(), radii.end(),
                         [r](int v) { return v >= r; }) /
           n;
  };
  if (accuracy(0) < options.tau) return std::optional<RadiusAccuracy>();
  const int top = *std::max_element(radii.begin(), radii.end());
  RadiusAccuracy best{0, accuracy(0)};
  for (int r = 1; r <= top; ++r) {
    const double acc = accuracy(r);
    if (acc < options.tau) break;
    best = {r, acc};
  }
  return std::optional<RadiusAccuracy>(best);
}

absl::StatusOr<DeletionPolicy> CalibrationResult::ToPolicy() const {
  return DeletionPolicy::Binned(bins.boundaries, expected_lengths);
}

nlohmann::ordered_json CalibrationResult::DiagnosticsJson() const {
  nlohmann::ordered_json bins_json = nlohmann::ordered_json::array();
  for (size_t i = 0; i < diagnostics.size(); ++i) {
    const BinDiagnostics& d = diagnostics[i];
    nlohmann::ordered_json j;
    j["bin"] = i;
    j["K"] = d.k;
    j["optimized"] = d.optimized;
    if (d.optimized) {
      j["bracket"] = {d.low, d.high};
      j["iterations"] = d.brackets.empty() ? 0 : d.brackets.size() - 1;
    }
    if (d.achieved.has_value()) {
      j["radius"] = d.achieved->radius;
      j["certified_accuracy"] = d.achieved->accuracy;
    } else {
      j["radius"] = nullptr;
    }
    bins_json.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["bins"] = std::move(bins_json);
  out["warnings"] = warnings;
  return out;
}

absl::StatusOr<CalibrationResult> OptimizeExpectedLengths(
    const BaseClassifier& base, std::span<const Example> data,
    const BinSpec& bins, const CalibrationOptions& options) {
  if (!(options.tol > 0.0)) return absl::InvalidArgumentError("tol must be > 0");
  if (options.m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(options.p_lb >= 0.0 && options.p_lb < 1.0)) {
    return absl::InvalidArgumentError("p_lb must lie in [0, 1)");
  }
  if (data.empty()) return absl::InvalidArgumentError("empty dataset");
  const size_t num = bins.num_bins();
  if (bins.boundaries.size() < 2 || bins.boundaries.front() != 0.0 ||
      !std::isinf(bins.boundaries.back())) {
    return absl::InvalidArgumentError("bin boundaries must run from 0 to inf");
  }

  // Bin membership follows the same rule as the Binned policy.
  BinnedRate layout{bins.boundaries, std::vector<double>(num, 1.0)};
  std::vector<std::vector<size_t>> members(num);
  double longest = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    members[layout.BinIndex(data[i].tokens.size())].push_back(i);
    longest = std::max(longest, static_cast<double>(data[i].tokens.size()));
  }
  const auto upper_edge = [&](size_t i) {
    return i + 1 < num ? bins.boundaries[i + 1]
                       : std::max(longest, bins.boundaries[i]);
  };

  CalibrationResult result;
  result.bins = bins;
  result.expected_lengths.assign(num, 0.0);
  result.diagnostics.resize(num);

  const auto default_k = [&](size_t i) {
    return (1.0 - options.p_lb) * 0.5 * (bins.boundaries[i] + upper_edge(i));
  };

  for (size_t i = 0; i < num; ++i) {
    BinDiagnostics& diag = result.diagnostics[i];
    if (i == 0 || members[i].empty()) {
      if (i > 0) {
        result.warnings.push_back(absl::StrCat(
            "bin ", i, " has no examples; using the default K"));
      }
      diag.k = default_k(i);
      if (!(diag.k > 0.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "default K for bin ", i, " is not positive"));
      }
      result.expected_lengths[i] = diag.k;
      continue;
    }

    double low = 0.01 * upper_edge(i);
    double high = 0.3 * bins.boundaries[i];
    if (low > high) {
      std::swap(low, high);
      result.warnings.push_back(absl::StrFormat(
          "bin %d: bracket [0.01 g_{i+1}, 0.3 g_i] is inverted; searching "
          "[%g, %g]",
          i, low, high));
    }
    diag.low = low;
    diag.high = high;

    std::vector<Example> sample;
    BitGen gen = MakeStream(options.seed, Stream::kSampling, i);
    std::vector<size_t> pool = members[i];
    if (pool.size() >= static_cast<size_t>(options.m)) {
      for (int j = 0; j < options.m; ++j) {
        const size_t pick = j + UniformIndex(gen, pool.size() - j);
        std::swap(pool[j], pool[pick]);
        sample.push_back(data[pool[j]]);
      }
    } else {
      result.warnings.push_back(absl::StrCat(
          "bin ", i, " has ", pool.size(), " examples, fewer than m = ",
          options.m, "; sampling with replacement"));
      for (int j = 0; j < options.m; ++j) {
        sample.push_back(data[pool[UniformIndex(gen, pool.size())]]);
      }
    }

    absl::Status failure;
    const auto objective = [&](double k) -> std::pair<int, double> {
      if (!failure.ok()) return {-1, 0.0};
      auto r = MaxCertRadius(base, k, sample, options, i);
      if (!r.ok()) {
        failure = r.status();
        return {-1, 0.0};
      }
      if (!r->has_value()) return {-1, 0.0};
      return {(*r)->radius, (*r)->accuracy};
    };
    diag.k = GoldenSectionMaximize(low, high, options.tol, objective,
                                   &diag.brackets);
    if (!failure.ok()) return failure;
    diag.optimized = true;
    auto achieved = MaxCertRadius(base, diag.k, sample, options, i);
    if (!achieved.ok()) return achieved.status();
    diag.achieved = *achieved;
    result.expected_lengths[i] = diag.k;
  }
  return result;
}

}  // namespace delcert
