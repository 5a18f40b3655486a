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

// Token sequences, edit-operation sets, directional edit distance, LCS and
// exhaustive edit-ball enumeration for small instances.

#ifndef DELCERT_CORE_H_
#define DELCERT_CORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace delcert {

using Token = int32_t;
using TokenSequence = std::vector<Token>;

struct SequenceHash {
  size_t operator()(const TokenSequence& s) const noexcept;
};

// Stable 64-bit digest of a sequence (FNV-1a over the token bytes, then a
// SplitMix64 finalizer). Used wherever a seed-stable hash is needed.
uint64_t SequenceDigest(const TokenSequence& s, uint64_t seed = 0);

// Which edit operations the threat model allows.
struct EditOps {
  bool del = true;
  bool ins = true;
  bool sub = true;

  static EditOps All() { return {true, true, true}; }
  // Parses a comma-separated list such as "del,sub"; "all" enables every op.
  static absl::StatusOr<EditOps> Parse(std::string_view spec);

  bool any() const { return del || ins || sub; }
  std::string ToString() const;
  bool operator==(const EditOps&) const = default;
};

// Vocabulary of `size` token ids, optionally carrying a word table for text
// datasets. Words are split on Unicode whitespace (ASCII whitespace plus the
// common multi-byte space separators).
class Vocabulary {
 public:
  explicit Vocabulary(int size = 1) : size_(size) {}

  static absl::StatusOr<Vocabulary> OfSize(int size);
  static absl::StatusOr<Vocabulary> FromJson(const nlohmann::json& j);

  int size() const { return size_; }
  bool has_table() const { return !words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }

  // Id of `word`, adding it to the table if unseen.
  Token Intern(std::string_view word);
  std::optional<Token> Find(std::string_view word) const;
  TokenSequence Tokenize(std::string_view text);

  nlohmann::json ToJson() const;

 private:
  int size_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, Token> index_;
};

std::vector<std::string> SplitWhitespace(std::string_view text);

// Minimum number of enabled edits turning x into y (ops act on x). Returns
// nullopt when no sequence of enabled edits reaches y.
std::optional<int> EditDistance(const TokenSequence& x, const TokenSequence& y,
                                EditOps ops);

int LcsLength(const TokenSequence& x, const TokenSequence& y);

inline constexpr size_t kDefaultBallCap = 1'000'000;

// Every sequence within directional edit distance r of x, sorted and
// deduplicated. Breadth-first over single edits; fails with
// ResourceExhausted once more than `max_elements` sequences are reached.
absl::StatusOr<std::vector<TokenSequence>> EnumerateBall(
    const TokenSequence& x, int r, EditOps ops, int vocab_size,
    size_t max_elements = kDefaultBallCap);

nlohmann::json SequenceToJson(const TokenSequence& s);
absl::StatusOr<TokenSequence> SequenceFromJson(const nlohmann::json& j);

}  // namespace delcert

#endif  // DELCERT_CORE_H_
