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

#include <cmath>

#include "gtest/gtest.h"

namespace delcert {
namespace {

BoundInputs In(double mu, int len_x, int len_xp, int len_lcs, double psi,
               double psi_p) {
  return BoundInputs{mu, PairwiseGeometry{len_x, len_xp, len_lcs, psi, psi_p}};
}

TEST(BinomPmfTest, Examples) {
  EXPECT_NEAR(*BinomPmf(2, 0.5, 1), 0.5, 1e-15);
  EXPECT_NEAR(*BinomPmf(3, 0.9, 0), 0.729, 1e-15);
  // Sum over all 2^5 retain/delete outcomes with exactly two retained.
  double direct = 0.0;
  for (int pat = 0; pat < 32; ++pat) {
    if (__builtin_popcount(pat) == 2) direct += 0.3 * 0.3 * 0.7 * 0.7 * 0.7;
  }
  EXPECT_NEAR(*BinomPmf(5, 0.7, 2), direct, 1e-14);
  EXPECT_NEAR(*BinomPmf(5, 0.7, 2), 0.3087, 1e-14);
  EXPECT_EQ(*BinomPmf(4, 0.0, 4), 1.0);
  EXPECT_EQ(*BinomPmf(4, 1.0, 0), 1.0);
  EXPECT_EQ(*BinomPmf(0, 0.5, 0), 1.0);
  EXPECT_FALSE(BinomPmf(3, 0.5, 4).ok());
  EXPECT_FALSE(BinomPmf(3, 0.5, -1).ok());
}

TEST(BinomPmfTest, RowsNormalise) {
  for (double p : {0.01, 0.5, 0.9, 0.99}) {
    for (int n : {0, 1, 7, 50, 333, 1000, 2000}) {
      const BinomialRow row(n, p);
      ASSERT_NEAR(row.Sum(0, n), 1.0, 1e-10) << n << " " << p;
    }
  }
}

TEST(BinomialCoefficientTest, ExactBelowTwoToThe53) {
  EXPECT_EQ(BinomialCoefficient(50, 25), 126410606437752.0);
  EXPECT_EQ(BinomialCoefficient(10, 0), 1.0);
  EXPECT_EQ(BinomialCoefficient(10, 11), 0.0);
  EXPECT_NEAR(LogBinomialCoefficient(60, 30), std::log(1.1826458156486142e17),
              1e-9);
}

TEST(ThresholdLbTest, Examples) {
  EXPECT_EQ(ThresholdLb(In(1.0, 3, 2, 2, 0.9, 0.9)), 1);
  EXPECT_EQ(ThresholdLb(In(0.0, 3, 2, 2, 0.9, 0.9)), std::nullopt);
  EXPECT_EQ(ThresholdLb(In(1.0, 4, 4, 4, 0.7, 0.5)), 4);
}

TEST(PairwiseLbTest, Examples) {
  EXPECT_NEAR(PairwiseLb(In(1.0, 3, 2, 2, 0.9, 0.9)), 1.0, 1e-15);
  EXPECT_EQ(PairwiseLb(In(0.0, 3, 2, 2, 0.9, 0.9)), 0.0);
  // Identity: within one grid cell below mu.
  const auto id = In(0.99, 10, 10, 10, 0.9, 0.9);
  const int h = *ThresholdLb(id);
  const double lb = PairwiseLb(id);
  EXPECT_LE(lb, 0.99 + 1e-15);
  EXPECT_GE(lb, 0.99 - *BinomPmf(10, 0.9, h) / BinomialCoefficient(10, h));
}

// Reference values from a 60-digit evaluation of the same formulas.
TEST(PairwiseLbTest, MatchesReferenceEvaluation) {
  EXPECT_NEAR(PairwiseLb(In(0.8, 6, 5, 4, 0.7, 0.9)), 0.06630612244897957399,
              1e-13);
  EXPECT_EQ(PairwiseLb(In(0.8, 6, 5, 4, 0.9, 0.7)), 0.0);
  EXPECT_NEAR(PairwiseLb(In(0.95, 10, 12, 9, 0.5, 0.5)), 0.1123046875, 1e-13);
  EXPECT_EQ(PairwiseLb(In(0.6, 5, 5, 3, 0.5, 0.7)), 0.0);
  EXPECT_NEAR(PairwiseLb(In(0.99, 20, 19, 18, 0.9, 0.85)),
              0.60265985811508986403, 1e-13);
}

TEST(ThresholdUbTest, Examples) {
  EXPECT_EQ(ThresholdUb(In(0.0, 5, 5, 3, 0.5, 0.5)), 0);
  EXPECT_EQ(ThresholdUb(In(1.0, 5, 5, 3, 0.5, 0.7)), 3);
  EXPECT_EQ(ThresholdUb(In(0.9, 2, 2, 2, 0.9, 0.95)), 1);
}

TEST(PairwiseUbTest, Examples) {
  EXPECT_EQ(PairwiseUb(In(1.0, 4, 5, 3, 0.5, 0.5)), 1.0);
  const auto id = In(0.5, 6, 6, 6, 0.7, 0.7);
  const int h = ThresholdUb(id);
  const double ub = PairwiseUb(id);
  EXPECT_GE(ub, 0.5 - 1e-15);
  EXPECT_LE(ub, 0.5 + *BinomPmf(6, 0.7, h) / BinomialCoefficient(6, h) + 1e-15);
  EXPECT_LE(PairwiseUb(In(0.0, 5, 5, 4, 0.8, 0.8)), 1 - 0.8 + 1e-12);
}

TEST(PairwiseUbTest, MatchesReferenceEvaluation) {
  EXPECT_EQ(PairwiseUb(In(0.05, 6, 5, 4, 0.7, 0.9)), 1.0);
  EXPECT_NEAR(PairwiseUb(In(0.05, 6, 5, 4, 0.9, 0.7)), 0.60100000000000007816,
              1e-13);
  EXPECT_NEAR(PairwiseUb(In(0.2, 10, 10, 9, 0.5, 0.5)), 0.701171875, 1e-13);
  EXPECT_NEAR(PairwiseUb(In(0.01, 20, 19, 18, 0.9, 0.85)),
              0.20755981183821641557, 1e-13);
  EXPECT_NEAR(PairwiseUb(In(0.1, 8, 8, 8, 0.6, 0.6)), 0.10637567999999997679,
              1e-13);
  EXPECT_NEAR(PairwiseUb(In(0.3, 7, 9, 6, 0.7, 0.7)), 0.81347317000000000676,
              1e-13);
}

TEST(PairwiseBoundsTest, MonotoneInMu) {
  for (double psi : {0.5, 0.7, 0.9}) {
    for (double psi_p : {0.5, 0.7, 0.9}) {
      for (int lcs = 0; lcs <= 5; ++lcs) {
        double prev_lb = 0.0;
        double prev_ub = 0.0;
        for (int i = 0; i <= 20; ++i) {
          const auto in = In(i / 20.0, 6, 5, lcs, psi, psi_p);
          const double lb = PairwiseLb(in);
          const double ub = PairwiseUb(in);
          ASSERT_GE(lb, prev_lb - 1e-15);
          ASSERT_GE(ub, prev_ub - 1e-15);
          prev_lb = lb;
          prev_ub = ub;
        }
      }
    }
  }
}

TEST(PairwiseBoundsTest, IdentityTightness) {
  for (double psi : {0.3, 0.6, 0.9}) {
    for (int n : {1, 4, 9, 15}) {
      for (int i = 1; i <= 20; ++i) {
        const auto in = In(i / 20.0, n, n, n, psi, psi);
        const int h = *ThresholdLb(in);
        const double cell = *BinomPmf(n, psi, h) / BinomialCoefficient(n, h);
        ASSERT_LE(in.mu - PairwiseLb(in), cell + 1e-12);
        ASSERT_GE(in.mu - PairwiseLb(in), -1e-12);
      }
    }
  }
}

TEST(FixedRateLbTest, Examples) {
  EXPECT_NEAR(*FixedRateLb(1.0, 3, 2, 2, 0.9), 0.9, 1e-15);
  EXPECT_EQ(*FixedRateLb(0.0, 3, 2, 2, 0.9), 0.0);
  EXPECT_FALSE(FixedRateLb(0.5, 3, 2, 2, 0.0).ok());
  EXPECT_FALSE(FixedRateLb(0.5, 3, 2, 4, 0.5).ok());
  const double gap = PairwiseLb(In(0.99, 200, 200, 200, 0.9, 0.9)) -
                     *FixedRateLb(0.99, 200, 200, 200, 0.9);
  EXPECT_LT(std::abs(gap), 1e-6);
}

TEST(FixedRateLbTest, DominatedByVariableRateBound) {
  for (double p : {0.5, 0.8, 0.9}) {
    for (int lx = 2; lx <= 12; ++lx) {
      for (int lxp = std::max(0, lx - 2); lxp <= lx + 2; ++lxp) {
        for (int lcs = 0; lcs <= std::min(lx, lxp); ++lcs) {
          for (int i = 0; i <= 10; ++i) {
            const double mu = i / 10.0;
            const auto in = In(mu, lx, lxp, lcs, p, p);
            const double fixed = *FixedRateLb(mu, lx, lxp, lcs, p);
            const double var = PairwiseLb(in);
            ASSERT_GE(var, fixed - 1e-12);
            if (auto h = ThresholdLb(in)) {
              ASSERT_LE(var - fixed, std::pow(1 - p, *h) *
                                             std::pow(p, lxp - lx + lcs - *h) +
                                         1e-12);
            }
          }
        }
      }
    }
  }
}

TEST(LcsEnvelopeTest, RepairsNonMonotoneLowerBound) {
  // The raw bound shrinks when the common subsequence grows from 1 to 2.
  const double at1 = PairwiseLb(In(1.0, 4, 2, 1, 0.7, 0.9));
  const double at2 = PairwiseLb(In(1.0, 4, 2, 2, 0.7, 0.9));
  EXPECT_GT(at1, at2);
  EXPECT_EQ(LcsEnvelopeLb(In(1.0, 4, 2, 2, 0.7, 0.9)), at1);
}

TEST(LcsEnvelopeTest, MonotoneAndDominatesRawBounds) {
  for (double psi : {0.5, 0.7, 0.9}) {
    for (double psi_p : {0.5, 0.7, 0.9}) {
      for (int lxp = 2; lxp <= 9; ++lxp) {
        for (int i = 0; i <= 10; ++i) {
          double prev_lb = 0.0;
          double prev_ub = 1.0;
          for (int lcs = 0; lcs <= std::min(7, lxp); ++lcs) {
            const auto in = In(i / 10.0, 7, lxp, lcs, psi, psi_p);
            const double lb = LcsEnvelopeLb(in);
            const double ub = LcsEnvelopeUb(in);
            ASSERT_GE(lb, prev_lb);
            ASSERT_LE(ub, prev_ub);
            ASSERT_GE(lb, PairwiseLb(in));
            ASSERT_LE(ub, PairwiseUb(in));
            prev_lb = lb;
            prev_ub = ub;
          }
        }
      }
    }
  }
}

TEST(NeighborBoundsTest, AgreesWithDirectEnvelopes) {
  NeighborBounds nb(0.93, 0.04, 9, 0.8);
  for (int lxp = 6; lxp <= 12; ++lxp) {
    for (double psi_p : {0.7, 0.8, 0.85}) {
      for (int lcs = std::min(9, lxp); lcs >= 0; --lcs) {
        const PairwiseGeometry g{9, lxp, lcs, 0.8, psi_p};
        const double lb = LcsEnvelopeLb(BoundInputs{0.93, g});
        const double ub = LcsEnvelopeUb(BoundInputs{0.04, g});
        ASSERT_EQ(nb.Lb(lxp, psi_p, lcs), lb);
        ASSERT_EQ(nb.Ub(lxp, psi_p, lcs), ub);
        ASSERT_EQ(nb.Separated(lxp, psi_p, lcs), lb > ub);
      }
    }
  }
}

TEST(GeometryTest, Validation) {
  EXPECT_TRUE(PairwiseGeometry::Create(4, 3, 3, 0.5, 0.5).ok());
  EXPECT_FALSE(PairwiseGeometry::Create(4, 3, 4, 0.5, 0.5).ok());
  EXPECT_FALSE(PairwiseGeometry::Create(4, 3, 2, 1.0, 0.5).ok());
  EXPECT_FALSE(PairwiseGeometry::Create(-1, 3, 0, 0.5, 0.5).ok());
  EXPECT_FALSE(BoundInputs::Create(1.5, PairwiseGeometry{}).ok());
  EXPECT_NEAR((PairwiseGeometry{1, 1, 1, 0.9, 0.8}).Rho(),
              0.9 * 0.2 / (0.8 * 0.1), 1e-12);
}

// On fine grids (C(n, H) near 1e14) the cell index carries rounding noise of
// ~0.1; it must never be rounded up to the next cell.
TEST(PairwiseLbTest, FineGridNeverOvershoots) {
  auto geo = PairwiseGeometry::Create(100, 100, 97, 0.9, 0.9);
  auto in = BoundInputs::Create(0.9, *geo);
  ASSERT_TRUE(in.ok());
  EXPECT_LE(PairwiseLb(*in), in->RetainedMass());
  for (int n = 20; n <= 200; n += 9) {
    for (double mu = 0.5; mu < 1.0; mu += 0.037) {
      auto g = PairwiseGeometry::Create(n + 3, n + 3, n, 0.9, 0.9);
      auto b = BoundInputs::Create(mu, *g);
      ASSERT_TRUE(b.ok());
      const double w = b->RetainedMass();
      EXPECT_LE(PairwiseLb(*b), w + 2.3e-16) << n << " " << mu;
      auto closed = FixedRateLb(mu, n + 3, n + 3, n, 0.9);
      ASSERT_TRUE(closed.ok());
      EXPECT_GE(PairwiseLb(*b), *closed - 2.3e-16) << n << " " << mu;
    }
  }
}

}  // namespace
}  // namespace delcert
