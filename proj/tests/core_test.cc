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

#include "delcert/core.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "gtest/gtest.h"

namespace delcert {
namespace {

// Textbook recursion over (i, j) with memoisation; kept separate from the
// rolling-row DP under test.
int NaiveDistance(const TokenSequence& x, const TokenSequence& y, EditOps ops) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::map<std::pair<size_t, size_t>, int> memo;
  std::function<int(size_t, size_t)> d = [&](size_t i, size_t j) -> int {
    if (i == x.size() && j == y.size()) return 0;
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    int best = kInf;
    if (i < x.size() && j < y.size() && x[i] == y[j]) best = d(i + 1, j + 1);
    if (ops.del && i < x.size()) best = std::min(best, 1 + d(i + 1, j));
    if (ops.ins && j < y.size()) best = std::min(best, 1 + d(i, j + 1));
    if (ops.sub && i < x.size() && j < y.size() && x[i] != y[j]) {
      best = std::min(best, 1 + d(i + 1, j + 1));
    }
    return memo[{i, j}] = std::min(best, kInf);
  };
  return d(0, 0);
}

// All sequences over [0, vocab) with length <= max_len.
std::vector<TokenSequence> AllSequences(int vocab, int max_len) {
  std::vector<TokenSequence> out{{}};
  for (size_t start = 0; start < out.size(); ++start) {
    if (static_cast<int>(out[start].size()) == max_len) continue;
    for (int t = 0; t < vocab; ++t) {
      TokenSequence s = out[start];
      s.push_back(t);
      out.push_back(std::move(s));
    }
  }
  return out;
}

const EditOps kAll = EditOps::All();
const EditOps kDelIns{true, true, false};
const EditOps kDelSub{true, false, true};

TEST(EditDistanceTest, Examples) {
  EXPECT_EQ(EditDistance({1, 2, 3}, {1, 2, 3}, kAll), 0);
  EXPECT_EQ(EditDistance({1, 2, 3}, {1, 2, 3}, EditOps{false, false, true}), 0);
  EXPECT_EQ(EditDistance({1, 2, 3}, {1, 3}, kAll), 1);
  EXPECT_EQ(EditDistance({1, 2}, {1, 2, 3}, kDelSub), std::nullopt);
  EXPECT_EQ(EditDistance({}, {}, EditOps{true, false, false}), 0);
  EXPECT_EQ(EditDistance({}, {4, 4}, kAll), 2);
}

TEST(EditDistanceTest, DeletionOnlyIsDirectional) {
  const EditOps del{true, false, false};
  EXPECT_EQ(EditDistance({1, 2, 3}, {2}, del), 2);
  EXPECT_EQ(EditDistance({2}, {1, 2, 3}, del), std::nullopt);
}

TEST(EditDistanceTest, MatchesNaiveRecursionOnAllSmallPairs) {
  const auto seqs = AllSequences(3, 4);
  const std::vector<EditOps> op_sets = {
      kAll, kDelIns, kDelSub, {false, true, true}, {true, false, false},
      {false, true, false}, {false, false, true}};
  for (const EditOps ops : op_sets) {
    for (const auto& x : seqs) {
      for (const auto& y : seqs) {
        const int naive = NaiveDistance(x, y, ops);
        const auto got = EditDistance(x, y, ops);
        if (naive >= std::numeric_limits<int>::max() / 2) {
          ASSERT_FALSE(got.has_value());
        } else {
          ASSERT_EQ(got, naive) << ops.ToString();
        }
      }
    }
  }
}

TEST(EditDistanceTest, SymmetricWithAllOps) {
  const auto seqs = AllSequences(3, 6);
  // Every 7th sequence keeps the quadratic loop fast.
  for (size_t i = 0; i < seqs.size(); i += 7) {
    for (size_t j = 0; j < seqs.size(); j += 7) {
      ASSERT_EQ(EditDistance(seqs[i], seqs[j], kAll),
                EditDistance(seqs[j], seqs[i], kAll));
    }
  }
}

TEST(LcsTest, Examples) {
  EXPECT_EQ(LcsLength({1, 2, 3}, {1, 2, 3}), 3);
  EXPECT_EQ(LcsLength({1, 2, 3}, {}), 0);
  EXPECT_EQ(LcsLength({1, 2, 3, 4}, {2, 4, 1}), 2);
}

TEST(LcsTest, DelInsDistanceIdentity) {
  const auto seqs = AllSequences(3, 6);
  for (size_t i = 0; i < seqs.size(); i += 5) {
    for (size_t j = 0; j < seqs.size(); j += 11) {
      const auto& x = seqs[i];
      const auto& y = seqs[j];
      ASSERT_EQ(*EditDistance(x, y, kDelIns),
                static_cast<int>(x.size() + y.size()) - 2 * LcsLength(x, y));
    }
  }
}

TEST(EnumerateBallTest, Examples) {
  auto b0 = EnumerateBall({1}, 0, kAll, 2);
  ASSERT_TRUE(b0.ok());
  EXPECT_EQ(*b0, (std::vector<TokenSequence>{{1}}));

  auto b1 = EnumerateBall({1}, 1, EditOps{false, false, true}, 2);
  ASSERT_TRUE(b1.ok());
  EXPECT_EQ(*b1, (std::vector<TokenSequence>{{0}, {1}}));

  // Generate-then-filter count for (0, 1), radius 1, vocabulary 2.
  auto b2 = EnumerateBall({0, 1}, 1, kAll, 2);
  ASSERT_TRUE(b2.ok());
  EXPECT_EQ(b2->size(), 9u);

  auto del = EnumerateBall({0, 0, 0, 0}, 1, EditOps{true, false, false}, 2);
  ASSERT_TRUE(del.ok());
  EXPECT_EQ(del->size(), 2u);

  auto ins = EnumerateBall({1, 0, 1, 1, 0}, 2, EditOps{false, true, false}, 2);
  ASSERT_TRUE(ins.ok());
  EXPECT_EQ(ins->size(), 37u);
}

TEST(EnumerateBallTest, EqualsFilteredUniverse) {
  const std::vector<EditOps> op_sets = {kAll, kDelIns, {false, false, true},
                                        {true, false, false}};
  for (const EditOps ops : op_sets) {
    for (const TokenSequence& x :
         std::vector<TokenSequence>{{}, {0}, {0, 1, 1}, {2, 0, 1, 0}}) {
      for (int r = 0; r <= 2; ++r) {
        auto ball = EnumerateBall(x, r, ops, 3);
        ASSERT_TRUE(ball.ok());
        std::vector<TokenSequence> expected;
        for (const auto& y :
             AllSequences(3, static_cast<int>(x.size()) + r)) {
          if (NaiveDistance(x, y, ops) <= r) expected.push_back(y);
        }
        std::sort(expected.begin(), expected.end());
        ASSERT_EQ(*ball, expected) << ops.ToString() << " r=" << r;
      }
    }
  }
}

TEST(EnumerateBallTest, NestedInRadius) {
  for (int r = 0; r < 3; ++r) {
    auto small = EnumerateBall({0, 1, 0}, r, kAll, 2);
    auto big = EnumerateBall({0, 1, 0}, r + 1, kAll, 2);
    ASSERT_TRUE(small.ok() && big.ok());
    EXPECT_TRUE(std::includes(big->begin(), big->end(), small->begin(),
                              small->end()));
  }
}

TEST(EnumerateBallTest, CapAndValidation) {
  auto capped = EnumerateBall({0, 1, 2, 3}, 3, kAll, 4, 100);
  EXPECT_EQ(capped.status().code(), absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(EnumerateBall({5}, 1, kAll, 2).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(EnumerateBall({0}, -1, kAll, 2).ok());
}

TEST(EditOpsTest, ParseAndPrint) {
  auto ops = EditOps::Parse("sub, del");
  ASSERT_TRUE(ops.ok());
  EXPECT_TRUE(ops->del);
  EXPECT_FALSE(ops->ins);
  EXPECT_TRUE(ops->sub);
  EXPECT_EQ(ops->ToString(), "del,sub");
  EXPECT_FALSE(EditOps::Parse("").ok());
  EXPECT_FALSE(EditOps::Parse("del,swap").ok());
}

TEST(VocabularyTest, TokenizeInternsAndRoundTrips) {
  Vocabulary v;
  const TokenSequence s = v.Tokenize("the cat\tsat  on\nthe mat");
  EXPECT_EQ(s, (TokenSequence{0, 1, 2, 3, 0, 4}));
  EXPECT_EQ(v.size(), 5);
  auto back = Vocabulary::FromJson(v.ToJson());
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->words(), v.words());
  EXPECT_EQ(back->Find("mat"), 4);
  EXPECT_EQ(back->Find("dog"), std::nullopt);
  EXPECT_FALSE(Vocabulary::FromJson(nlohmann::json::parse("[\"a\",\"a\"]")).ok());
  EXPECT_FALSE(Vocabulary::OfSize(0).ok());
}

TEST(VocabularyTest, SplitsOnUnicodeWhitespace) {
  // U+00A0 no-break space, U+3000 ideographic space, U+2009 thin space.
  EXPECT_EQ(SplitWhitespace("a b　c d  "),
            (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_TRUE(SplitWhitespace(" \t\r\n").empty());
}

TEST(SequenceJsonTest, RoundTripAndErrors) {
  const TokenSequence s{3, 0, 7};
  auto back = SequenceFromJson(SequenceToJson(s));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, s);
  EXPECT_FALSE(SequenceFromJson(nlohmann::json::parse("[1,-2]")).ok());
  EXPECT_FALSE(SequenceFromJson(nlohmann::json::parse("{\"a\":1}")).ok());
}

TEST(SequenceDigestTest, StableAndLengthSensitive) {
  EXPECT_EQ(SequenceDigest({1, 2, 3}, 9), SequenceDigest({1, 2, 3}, 9));
  EXPECT_NE(SequenceDigest({1, 2, 3}, 9), SequenceDigest({1, 2, 3}, 10));
  EXPECT_NE(SequenceDigest({}), SequenceDigest({0}));
  EXPECT_NE(SequenceDigest({0}), SequenceDigest({0, 0}));
}

}  // namespace
}  // namespace delcert
