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

#include "delcert/bounds.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "absl/strings/str_cat.h"

namespace delcert {
namespace {

constexpr double kTwoPow53 = 9007199254740992.0;

// C(n, k) if it is at most 2^53, otherwise nullopt.
std::optional<double> ExactBinomialCoefficient(int n, int k) {
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (int i = 0; i < k; ++i) {
    c = c * static_cast<unsigned __int128>(n - i) / (i + 1);
    if (c > static_cast<unsigned __int128>(kTwoPow53)) return std::nullopt;
  }
  return static_cast<double>(c);
}

// Snaps q (a count of grid cells) to the nearest integer when it is within
// rounding noise of it. The tolerance is absolute: on fine grids a relative
// one would move q by whole cells and push a floor up past the true value.
double SnapToInteger(double q) {
  const double r = std::round(q);
  return std::abs(q - r) <= 1e-9 ? r : q;
}

// floor(a / v) * v with v = 1 / C(n, k). When C(n, k) exceeds 2^53 the grid
// is finer than double precision and a - v is used instead, which is still a
// lower bound on the gridded floor.
double GridFloor(double a, int n, int k) {
  if (auto c = ExactBinomialCoefficient(n, k)) {
    return std::floor(SnapToInteger(a * *c)) / *c;
  }
  return a - std::exp(-LogBinomialCoefficient(n, k));
}

double GridCeil(double a, int n, int k) {
  if (auto c = ExactBinomialCoefficient(n, k)) {
    return std::ceil(SnapToInteger(a * *c)) / *c;
  }
  return a + std::exp(-LogBinomialCoefficient(n, k));
}

// Smallest h with pmf[0] + ... + pmf[h] >= target, or largest h with
// pmf[h] + ... + pmf[n] >= target when `upward` is false. Rounding can leave
// the full sum a hair below a target of 1; the far end is returned then.
int GreedyThreshold(const BinomialRow& row, double target, bool upward) {
  const int n = row.n();
  double acc = 0.0;
  if (upward) {
    for (int h = 0; h <= n; ++h) {
      acc += row[h];
      if (acc >= target) return h;
    }
    return n;
  }
  for (int h = n; h >= 0; --h) {
    acc += row[h];
    if (acc >= target) return h;
  }
  return 0;
}

// Sizes filled completely before the threshold class.
std::pair<int, int> FullRange(int threshold, int n, bool upward) {
  return upward ? std::pair{0, threshold - 1} : std::pair{threshold + 1, n};
}

}  // namespace

absl::StatusOr<double> BinomPmf(int n, double p, int k) {
  if (n < 0 || k < 0 || k > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("binomial pmf needs 0 <= k <= n, got k=", k, " n=", n));
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError("binomial pmf needs p in [0, 1]");
  }
  return BinomialRow(n, p)[k];
}

BinomialRow::BinomialRow(int n, double p) : pmf_(n + 1, 0.0L) {
  if (p <= 0.0) {
    pmf_[n] = 1.0L;
    return;
  }
  if (p >= 1.0) {
    pmf_[0] = 1.0L;
    return;
  }
  // Extended precision keeps single-cell differences between bounds (down
  // to ~1e-15 for n near 100) above the rounding noise.
  const long double log_keep = std::log1p(-static_cast<long double>(p));
  const long double log_drop = std::log(static_cast<long double>(p));
  const long double lg_n = std::lgamma(n + 1.0L);
  for (int k = 0; k <= n; ++k) {
    pmf_[k] = std::exp(lg_n - std::lgamma(k + 1.0L) -
                        std::lgamma(n - k + 1.0L) + k * log_keep +
                        (n - k) * log_drop);
  }
}

double BinomialRow::Sum(int lo, int hi) const {
  lo = std::max(lo, 0);
  hi = std::min(hi, n());
  long double acc = 0.0L;
  for (int k = lo; k <= hi; ++k) acc += pmf_[k];
  return static_cast<double>(acc);
}

double LogBinomialCoefficient(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

double BinomialCoefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (auto c = ExactBinomialCoefficient(n, k)) return *c;
  return std::exp(LogBinomialCoefficient(n, k));
}

absl::StatusOr<PairwiseGeometry> PairwiseGeometry::Create(int len_x,
                                                          int len_xp,
                                                          int len_lcs,
                                                          double psi,
                                                          double psi_p) {
  if (len_x < 0 || len_xp < 0 || len_lcs < 0) {
    return absl::InvalidArgumentError("lengths must be non-negative");
  }
  if (len_lcs > std::min(len_x, len_xp)) {
    return absl::InvalidArgumentError(
        "common subsequence longer than one of the sequences");
  }
  if (!(psi >= 0.0 && psi < 1.0) || !(psi_p >= 0.0 && psi_p < 1.0)) {
    return absl::InvalidArgumentError("deletion rates must lie in [0, 1)");
  }
  return PairwiseGeometry{len_x, len_xp, len_lcs, psi, psi_p};
}

double PairwiseGeometry::Rho() const {
  return psi * (1.0 - psi_p) / (psi_p * (1.0 - psi));
}

absl::StatusOr<BoundInputs> BoundInputs::Create(double mu,
                                                PairwiseGeometry geometry) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    return absl::InvalidArgumentError("mu must lie in [0, 1]");
  }
  return BoundInputs{mu, geometry};
}

double BoundInputs::RetainedMass() const {
  return mu - 1.0 +
         std::pow(geometry.psi, geometry.len_x - geometry.len_lcs);
}

std::optional<int> ThresholdLb(const BoundInputs& in) {
  const double w = in.RetainedMass();
  if (w <= 0.0) return std::nullopt;
  const auto& g = in.geometry;
  return GreedyThreshold(BinomialRow(g.len_lcs, g.psi), w,
                         /*upward=*/!(g.psi < g.psi_p));
}

double PairwiseLb(const BoundInputs& in) {
  const auto& g = in.geometry;
  const double w = in.RetainedMass();
  if (w <= 0.0) return 0.0;
  const int n = g.len_lcs;
  const bool upward = !(g.psi < g.psi_p);
  const BinomialRow src(n, g.psi);
  const BinomialRow dst(n, g.psi_p);
  const int h = GreedyThreshold(src, w, upward);
  const auto [lo, hi] = FullRange(h, n, upward);

  const double residual = w - src.Sum(lo, hi);
  double fraction = 0.0;
  if (src[h] > 0.0) {
    fraction = std::clamp(GridFloor(residual / src[h], n, h), 0.0, 1.0);
  }
  const double prefactor = std::pow(g.psi_p, g.len_xp - n) /
                           std::pow(g.psi, g.len_x - n);
  const double value = prefactor * (dst.Sum(lo, hi) + dst[h] * fraction);
  return std::clamp(value, 0.0, 1.0);
}

int ThresholdUb(const BoundInputs& in) {
  const auto& g = in.geometry;
  return GreedyThreshold(BinomialRow(g.len_lcs, g.psi), in.mu,
                         /*upward=*/!(g.psi > g.psi_p));
}

double PairwiseUb(const BoundInputs& in) {
  const auto& g = in.geometry;
  if (in.mu >= 1.0) return 1.0;
  const double psi_a = std::pow(g.psi, g.len_x - g.len_lcs);
  if (psi_a <= 0.0) return 1.0;
  const int n = g.len_lcs;
  const bool upward = !(g.psi > g.psi_p);
  const BinomialRow src(n, g.psi);
  const BinomialRow dst(n, g.psi_p);
  const int h = GreedyThreshold(src, in.mu, upward);
  const auto [lo, hi] = FullRange(h, n, upward);

  const double residual = in.mu - src.Sum(lo, hi);
  double fraction = 1.0;
  if (src[h] > 0.0) {
    fraction = std::clamp(GridCeil(residual / src[h], n, h), 0.0, 1.0);
  }
  const double psi_pb = std::pow(g.psi_p, g.len_xp - n);
  const double value =
      psi_pb / psi_a * (dst.Sum(lo, hi) + dst[h] * fraction) + 1.0 - psi_pb;
  return std::clamp(value, 0.0, 1.0);
}

absl::StatusOr<double> FixedRateLb(double mu, int len_x, int len_xp,
                                   int len_lcs, double p_del) {
  if (!(p_del > 0.0 && p_del < 1.0)) {
    return absl::InvalidArgumentError("fixed-rate bound needs 0 < p_del < 1");
  }
  auto geometry = PairwiseGeometry::Create(len_x, len_xp, len_lcs, p_del, p_del);
  if (!geometry.ok()) return geometry.status();
  auto in = BoundInputs::Create(mu, *geometry);
  if (!in.ok()) return in.status();
  const auto h = ThresholdLb(*in);
  if (!h.has_value()) return 0.0;
  const double w = in->RetainedMass();
  const int shift = len_xp - len_x;
  const double value =
      std::pow(p_del, shift) * w -
      std::pow(1.0 - p_del, *h) * std::pow(p_del, shift + len_lcs - *h);
  return std::clamp(value, 0.0, 1.0);
}

double LcsEnvelopeLb(const BoundInputs& in) {
  double best = 0.0;
  BoundInputs probe = in;
  for (int n = 0; n <= in.geometry.len_lcs; ++n) {
    probe.geometry.len_lcs = n;
    best = std::max(best, PairwiseLb(probe));
  }
  return best;
}

double LcsEnvelopeUb(const BoundInputs& in) {
  double best = 1.0;
  BoundInputs probe = in;
  for (int n = 0; n <= in.geometry.len_lcs; ++n) {
    probe.geometry.len_lcs = n;
    best = std::min(best, PairwiseUb(probe));
  }
  return best;
}

NeighborBounds::NeighborBounds(double t1_lb, double t2_ub, int len_x,
                               double psi)
    : t1_lb_(t1_lb), t2_ub_(t2_ub), len_x_(len_x), psi_(psi) {}

NeighborBounds::Envelope& NeighborBounds::Extend(int len_xp, double psi_p,
                                                 int len_lcs) {
  Envelope& env = cache_[{len_xp, psi_p}];
  for (int n = static_cast<int>(env.lb.size()); n <= len_lcs; ++n) {
    const PairwiseGeometry g{len_x_, len_xp, n, psi_, psi_p};
    const double lb = PairwiseLb(BoundInputs{t1_lb_, g});
    const double ub = PairwiseUb(BoundInputs{t2_ub_, g});
    env.lb.push_back(env.lb.empty() ? lb : std::max(env.lb.back(), lb));
    env.ub.push_back(env.ub.empty() ? ub : std::min(env.ub.back(), ub));
  }
  return env;
}

double NeighborBounds::Lb(int len_xp, double psi_p, int len_lcs) {
  return Extend(len_xp, psi_p, len_lcs).lb[len_lcs];
}

double NeighborBounds::Ub(int len_xp, double psi_p, int len_lcs) {
  return Extend(len_xp, psi_p, len_lcs).ub[len_lcs];
}

bool NeighborBounds::Separated(int len_xp, double psi_p, int len_lcs) {
  const PairwiseGeometry g{len_x_, len_xp, len_lcs, psi_, psi_p};
  if (PairwiseLb(BoundInputs{t1_lb_, g}) > PairwiseUb(BoundInputs{t2_ub_, g})) {
    return true;
  }
  return Lb(len_xp, psi_p, len_lcs) > Ub(len_xp, psi_p, len_lcs);
}

}  // namespace delcert
