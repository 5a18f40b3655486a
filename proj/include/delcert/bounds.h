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

// Pairwise bounds on the smoothed class probability at a neighbouring input.
//
// Given mu = p_y(x) under deletion rate psi, and a neighbour x' smoothed at
// rate psi', the bounds depend only on |x|, |x'|, the length of a common
// subsequence z of the two, and the two rates. Masks that keep only tokens of
// z are matched one-to-one between x and x'; the worst-case base classifier
// then solves a bounded knapsack over mask sizes, which a greedy fill solves
// up to one partially used size class H*. Partial classes are rounded to
// whole masks on the grid 1 / C(|z|, H*).
//
// Notation used below: B(n, p, k) = C(n, k) (1 - p)^k p^(n - k), the
// probability of retaining exactly k of n tokens at deletion rate p.

#ifndef DELCERT_BOUNDS_H_
#define DELCERT_BOUNDS_H_

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace delcert {

// B(n, p, k), evaluated through log-gamma. Exact at p in {0, 1}.
absl::StatusOr<double> BinomPmf(int n, double p, int k);

// All of B(n, p, 0..n).
class BinomialRow {
 public:
  BinomialRow(int n, double p);

  int n() const { return static_cast<int>(pmf_.size()) - 1; }
  double operator[](int k) const { return static_cast<double>(pmf_[k]); }
  // Sum of B(n, p, k) for k in [lo, hi]; empty ranges give 0.
  double Sum(int lo, int hi) const;

 private:
  std::vector<long double> pmf_;
};

// ln C(n, k), and C(n, k) as a double (exact up to 2^53).
double LogBinomialCoefficient(int n, int k);
double BinomialCoefficient(int n, int k);

struct PairwiseGeometry {
  int len_x = 0;    // |x|
  int len_xp = 0;   // |x'|
  int len_lcs = 0;  // |z|, a common subsequence length (the LCS when tight)
  double psi = 0;   // deletion rate at x
  double psi_p = 0; // deletion rate at x'

  static absl::StatusOr<PairwiseGeometry> Create(int len_x, int len_xp,
                                                 int len_lcs, double psi,
                                                 double psi_p);

  // psi (1 - psi') / (psi' (1 - psi)).
  double Rho() const;
};

struct BoundInputs {
  double mu = 0;
  PairwiseGeometry geometry;

  static absl::StatusOr<BoundInputs> Create(double mu,
                                            PairwiseGeometry geometry);

  // mu - 1 + psi^(|x| - |z|): probability mass that provably sits on masks
  // keeping only tokens of z.
  double RetainedMass() const;
};

// Size class at which the lower bound's greedy fill stops. Filling runs
// upward from size 0 when psi >= psi' and downward from |z| otherwise.
// Returns nullopt when RetainedMass() <= 0; the lower bound is then 0.
std::optional<int> ThresholdLb(const BoundInputs& in);

// max(0, lb): lower bound on p_y(x') valid for every base classifier with
// p_y(x) = mu.
double PairwiseLb(const BoundInputs& in);

// Size class at which the upper bound's greedy fill stops. Filling runs
// upward when psi <= psi' and downward otherwise, against target mu.
int ThresholdUb(const BoundInputs& in);

// min(1, ub): upper bound on p_y(x').
double PairwiseUb(const BoundInputs& in);

// Closed form for psi = psi' = p_del:
//   p^(|x'| - |x|) (mu - 1 + p^(|x| - |z|) - (1 - p)^H* p^(|z| - H*)),
// clamped to [0, 1]. Never exceeds PairwiseLb on the same inputs.
absl::StatusOr<double> FixedRateLb(double mu, int len_x, int len_xp,
                                   int len_lcs, double p_del);

// The bounds hold for every common subsequence, not only the longest one, and
// are not monotone in its length. These take the best value over all common
// subsequence lengths 0..len_lcs, which is monotone in len_lcs.
double LcsEnvelopeLb(const BoundInputs& in);
double LcsEnvelopeUb(const BoundInputs& in);

// Memoised envelopes for one certification: the lower bound of t1 and the
// upper bound of t2 at x, queried for many neighbour geometries.
class NeighborBounds {
 public:
  NeighborBounds(double t1_lb, double t2_ub, int len_x, double psi);

  // Envelope bounds at a neighbour of length len_xp, smoothed at psi_p, whose
  // common subsequence with x has length at least len_lcs.
  double Lb(int len_xp, double psi_p, int len_lcs);
  double Ub(int len_xp, double psi_p, int len_lcs);

  // Lb(...) > Ub(...). Tries the bounds at len_lcs alone before building
  // the envelopes.
  bool Separated(int len_xp, double psi_p, int len_lcs);

 private:
  struct Envelope {
    std::vector<double> lb;  // running max over common subsequence lengths
    std::vector<double> ub;  // running min
  };
  Envelope& Extend(int len_xp, double psi_p, int len_lcs);

  double t1_lb_;
  double t2_ub_;
  int len_x_;
  double psi_;
  std::map<std::pair<int, double>, Envelope> cache_;
};

}  // namespace delcert

#endif  // DELCERT_BOUNDS_H_
