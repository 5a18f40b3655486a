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

#include "delcert/classifiers.h"

#include "absl/status/status.h"
#include "gtest/gtest.h"

namespace delcert {
namespace {

TEST(ClassifiersTest, Constant) {
  ConstantClassifier c(2, 4);
  std::vector<TokenSequence> batch{{}, {1, 2}};
  EXPECT_EQ(*c.ClassifyBatch(batch), (std::vector<int>{2, 2}));
  EXPECT_EQ(c.num_classes(), 4);
}

TEST(ClassifiersTest, EmptyBatchRejected) {
  ConstantClassifier c(0, 2);
  EXPECT_FALSE(c.ClassifyBatch({}).ok());
}

TEST(ClassifiersTest, KeywordThreshold) {
  KeywordClassifier k({3, 4}, 2);
  std::vector<TokenSequence> batch{{3}, {3, 3}, {3, 4, 1}, {1, 2}};
  EXPECT_EQ(*k.ClassifyBatch(batch), (std::vector<int>{0, 1, 1, 0}));
}

TEST(ClassifiersTest, HashIsDeterministicAndInRange) {
  HashClassifier a(5, 3), b(5, 3);
  std::vector<TokenSequence> batch;
  for (int i = 0; i < 200; ++i) batch.push_back({i, i + 1});
  auto la = *a.ClassifyBatch(batch);
  EXPECT_EQ(la, *b.ClassifyBatch(batch));
  int seen[3] = {0, 0, 0};
  for (int l : la) {
    ASSERT_GE(l, 0);
    ASSERT_LT(l, 3);
    ++seen[l];
  }
  for (int s : seen) EXPECT_GT(s, 20);
}

TEST(ClassifiersTest, FunctionLabelsOutOfRangeRejected) {
  FunctionClassifier f([](const TokenSequence&) { return 5; }, 2);
  std::vector<TokenSequence> batch{{1}};
  EXPECT_FALSE(f.ClassifyBatch(batch).ok());
}

TEST(BuiltinClassifierTest, Specs) {
  auto c = MakeBuiltinClassifier("constant:1");
  ASSERT_TRUE(c.ok());
  EXPECT_EQ((*c)->num_classes(), 2);
  c = MakeBuiltinClassifier("constant:3:5");
  ASSERT_TRUE(c.ok());
  EXPECT_EQ((*c)->num_classes(), 5);
  c = MakeBuiltinClassifier("hash:9:4");
  ASSERT_TRUE(c.ok());
  EXPECT_EQ((*c)->num_classes(), 4);
  c = MakeBuiltinClassifier("keyword:7,8:2");
  ASSERT_TRUE(c.ok());
  std::vector<TokenSequence> batch{{7, 8}, {7}};
  EXPECT_EQ(*(*c)->ClassifyBatch(batch), (std::vector<int>{1, 0}));
}

TEST(BuiltinClassifierTest, KeywordWordsUseVocabulary) {
  Vocabulary v(0);
  v.Tokenize("the bad movie");
  auto c = MakeBuiltinClassifier("keyword:bad", &v);
  ASSERT_TRUE(c.ok()) << c.status();
  std::vector<TokenSequence> batch{v.Tokenize("bad"), v.Tokenize("the")};
  EXPECT_EQ(*(*c)->ClassifyBatch(batch), (std::vector<int>{1, 0}));
  EXPECT_FALSE(MakeBuiltinClassifier("keyword:unknownword", &v).ok());
}

TEST(BuiltinClassifierTest, BadSpecs) {
  for (const char* s : {"", "nope", "constant:", "constant:x", "hash:1",
                        "hash:1:0", "constant:3:2", "keyword:"}) {
    EXPECT_FALSE(MakeBuiltinClassifier(s).ok()) << s;
  }
}

}  // namespace
}  // namespace delcert
