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

#include "delcert/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "absl/strings/str_cat.h"
#include "delcert/bounds.h"
#include "delcert/estimation.h"

namespace delcert {

absl::StatusOr<ExactScores> ExactSmoothedScores(const BaseClassifier& base,
                                                const TokenSequence& x,
                                                double rate) {
  const int n = static_cast<int>(x.size());
  if (n > kMaxExactLength) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exact scores need |x| <= ", kMaxExactLength, ", got ", n));
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    return absl::InvalidArgumentError("rate must lie in [0, 1]");
  }
  // Mask mass depends only on the number of retained tokens.
  std::vector<double> mass(n + 1);
  for (int k = 0; k <= n; ++k) {
    mass[k] = std::pow(rate, n - k) * std::pow(1.0 - rate, k);
  }

  ExactScores out;
  out.rate = rate;
  out.probabilities.assign(base.num_classes(), 0.0);
  const uint64_t total = uint64_t{1} << n;
  std::vector<TokenSequence> batch;
  std::vector<int> retained;
  const uint64_t chunk = std::max<uint64_t>(1, base.preferred_batch_size());
  for (uint64_t start = 0; start < total; start += chunk) {
    const uint64_t end = std::min<uint64_t>(total, start + chunk);
    batch.clear();
    retained.clear();
    for (uint64_t pattern = start; pattern < end; ++pattern) {
      TokenSequence sub;
      for (int i = 0; i < n; ++i) {
        if ((pattern >> i) & 1) sub.push_back(x[i]);
      }
      retained.push_back(static_cast<int>(sub.size()));
      batch.push_back(std::move(sub));
    }
    auto labels = base.ClassifyBatch(batch);
    if (!labels.ok()) return labels.status();
    for (size_t i = 0; i < labels->size(); ++i) {
      const int y = (*labels)[i];
      if (y < 0 || y >= base.num_classes()) {
        return absl::InternalError("classifier label out of range");
      }
      out.probabilities[y] += mass[retained[i]];
    }
  }
  // Rounding can push a sum a few ulps past 1.
  for (double& p : out.probabilities) p = std::min(p, 1.0);
  return out;
}

RateFunction PolicyRate(DeletionPolicy policy) {
  return [policy = std::move(policy)](const TokenSequence& s) {
    auto r = SmoothingRate(policy, s.size());
    return r.ok() ? *r : std::numeric_limits<double>::quiet_NaN();
  };
}

std::unique_ptr<BaseClassifier> MakeRandomTableClassifier(uint64_t seed,
                                                          int num_classes,
                                                          double p_first) {
  auto fn = [seed, num_classes, p_first](const TokenSequence& s) {
    const uint64_t h = SequenceDigest(s, seed);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (num_classes == 1 || u < p_first) return 0;
    return 1 + static_cast<int>((h & 0x7ff) % (num_classes - 1));
  };
  return std::make_unique<FunctionClassifier>(
      fn, num_classes, absl::StrCat("table:", seed, ":", num_classes));
}

bool BoundCheck::ok(double slack) const {
  return lb <= exact + slack && exact <= ub + slack &&
         envelope_lb <= exact + slack && exact <= envelope_ub + slack;
}

nlohmann::ordered_json BoundCheck::ToJson() const {
  nlohmann::ordered_json j;
  j["neighbor"] = SequenceToJson(neighbor);
  j["label"] = label;
  j["lcs"] = lcs;
  j["psi_p"] = psi_p;
  j["mu"] = mu;
  j["exact"] = exact;
  j["lb"] = lb;
  j["ub"] = ub;
  j["envelope_lb"] = envelope_lb;
  j["envelope_ub"] = envelope_ub;
  return j;
}

int ValidationReport::violations() const {
  return static_cast<int>(std::count_if(
      checks.begin(), checks.end(),
      [this](const BoundCheck& c) { return !c.ok(slack); }));
}

double ValidationReport::min_lb_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    m = std::min({m, c.exact - c.lb, c.exact - c.envelope_lb});
  }
  return m;
}

double ValidationReport::min_ub_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    m = std::min({m, c.ub - c.exact, c.envelope_ub - c.exact});
  }
  return m;
}

absl::StatusOr<ValidationReport> ValidateBounds(
    const BaseClassifier& base, const TokenSequence& x, const RateFunction& rate,
    EditOps ops, int r, int vocab_size, const ValidationOptions& options) {
  if (static_cast<int>(x.size()) + std::max(r, 0) > kMaxExactLength) {
    return absl::ResourceExhaustedError(
        absl::StrCat("|x| + r must be <= ", kMaxExactLength));
  }
  ValidationReport report;
  report.x = x;
  report.slack = options.slack;
  report.psi = rate(x);
  if (!(report.psi >= 0.0 && report.psi < 1.0)) {
    return absl::InvalidArgumentError("deletion rate at x must lie in [0, 1)");
  }
  auto at_x = ExactSmoothedScores(base, x, report.psi);
  if (!at_x.ok()) return at_x.status();
  auto ball = EnumerateBall(x, r, ops, vocab_size, options.ball_cap);
  if (!ball.ok()) return ball.status();

  const int len_x = static_cast<int>(x.size());
  for (const TokenSequence& xp : *ball) {
    const double psi_p = rate(xp);
    if (!(psi_p >= 0.0 && psi_p < 1.0)) {
      return absl::InvalidArgumentError("deletion rate must lie in [0, 1)");
    }
    auto at_xp = ExactSmoothedScores(base, xp, psi_p);
    if (!at_xp.ok()) return at_xp.status();
    const int lcs = LcsLength(x, xp);
    const PairwiseGeometry geometry{len_x, static_cast<int>(xp.size()), lcs,
                                    report.psi, psi_p};
    for (int y = 0; y < base.num_classes(); ++y) {
      const BoundInputs in{at_x->probabilities[y], geometry};
      BoundCheck c;
      c.neighbor = xp;
      c.label = y;
      c.lcs = lcs;
      c.psi_p = psi_p;
      c.mu = in.mu;
      c.exact = at_xp->probabilities[y];
      c.lb = PairwiseLb(in) + options.lb_offset;
      c.ub = PairwiseUb(in);
      c.envelope_lb = LcsEnvelopeLb(in) + options.lb_offset;
      c.envelope_ub = LcsEnvelopeUb(in);
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace delcert
