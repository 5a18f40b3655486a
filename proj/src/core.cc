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
#include <limits>
#include <unordered_set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace delcert {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Byte length of a whitespace code point starting at text[i], or 0.
size_t WhitespaceLength(std::string_view text, size_t i) {
  const auto byte = [&](size_t k) -> unsigned char {
    return k < text.size() ? static_cast<unsigned char>(text[k]) : 0;
  };
  const unsigned char c = byte(i);
  if (c == ' ' || (c >= 0x09 && c <= 0x0d) || (c >= 0x1c && c <= 0x1f)) {
    return 1;
  }
  if (c == 0xc2 && (byte(i + 1) == 0x85 || byte(i + 1) == 0xa0)) return 2;
  if (c == 0xe1 && byte(i + 1) == 0x9a && byte(i + 2) == 0x80) return 3;
  if (c == 0xe2 && byte(i + 1) == 0x80) {
    const unsigned char d = byte(i + 2);
    if ((d >= 0x80 && d <= 0x8a) || d == 0xa8 || d == 0xa9 || d == 0xaf) {
      return 3;
    }
  }
  if (c == 0xe2 && byte(i + 1) == 0x81 && byte(i + 2) == 0x9f) return 3;
  if (c == 0xe3 && byte(i + 1) == 0x80 && byte(i + 2) == 0x80) return 3;
  return 0;
}

}  // namespace

size_t SequenceHash::operator()(const TokenSequence& s) const noexcept {
  return static_cast<size_t>(SequenceDigest(s));
}

uint64_t SequenceDigest(const TokenSequence& s, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ SplitMix64(seed);
  for (Token t : s) {
    auto u = static_cast<uint32_t>(t);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  // Length is mixed in so that prefixes never collide trivially.
  return SplitMix64(h ^ (static_cast<uint64_t>(s.size()) << 1));
}

absl::StatusOr<EditOps> EditOps::Parse(std::string_view spec) {
  EditOps ops{false, false, false};
  for (absl::string_view part :
       absl::StrSplit(absl::string_view(spec.data(), spec.size()), ',',
                      absl::SkipEmpty())) {
    part = absl::StripAsciiWhitespace(part);
    if (part == "del") {
      ops.del = true;
    } else if (part == "ins") {
      ops.ins = true;
    } else if (part == "sub") {
      ops.sub = true;
    } else if (part == "all") {
      ops = All();
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown edit operation '", part, "'"));
    }
  }
  if (!ops.any()) {
    return absl::InvalidArgumentError("at least one edit operation required");
  }
  return ops;
}

std::string EditOps::ToString() const {
  std::vector<std::string> parts;
  if (del) parts.push_back("del");
  if (ins) parts.push_back("ins");
  if (sub) parts.push_back("sub");
  return absl::StrJoin(parts, ",");
}

absl::StatusOr<Vocabulary> Vocabulary::OfSize(int size) {
  if (size < 1) {
    return absl::InvalidArgumentError("vocabulary size must be positive");
  }
  return Vocabulary(size);
}

absl::StatusOr<Vocabulary> Vocabulary::FromJson(const nlohmann::json& j) {
  if (j.is_array()) {
    Vocabulary v(1);
    for (const auto& w : j) {
      if (!w.is_string()) {
        return absl::DataLossError("token table entries must be strings");
      }
      const std::string word = w.get<std::string>();
      if (v.index_.count(word) != 0) {
        return absl::DataLossError(
            absl::StrCat("duplicate token table entry '", word, "'"));
      }
      v.Intern(word);
    }
    return v;
  }
  if (j.is_object() && j.contains("size") && j["size"].is_number_integer()) {
    return OfSize(j["size"].get<int>());
  }
  return absl::DataLossError("vocabulary JSON must be a word array or {size}");
}

Token Vocabulary::Intern(std::string_view word) {
  auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<Token>(words_.size());
  words_.emplace_back(word);
  index_.emplace(std::string(word), id);
  size_ = std::max<int>(size_, static_cast<int>(words_.size()));
  return id;
}

std::optional<Token> Vocabulary::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenSequence Vocabulary::Tokenize(std::string_view text) {
  TokenSequence out;
  for (const std::string& w : SplitWhitespace(text)) out.push_back(Intern(w));
  return out;
}

nlohmann::json Vocabulary::ToJson() const {
  if (has_table()) return nlohmann::json(words_);
  return nlohmann::json{{"size", size_}};
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  std::string current;
  while (i < text.size()) {
    const size_t ws = WhitespaceLength(text, i);
    if (ws > 0) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
      i += ws;
    } else {
      current.push_back(text[i]);
      ++i;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::optional<int> EditDistance(const TokenSequence& x, const TokenSequence& y,
                                EditOps ops) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  const size_t n = x.size();
  const size_t m = y.size();
  // Rolling rows: prev[j] = cost of turning x[0..i-1) into y[0..j).
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = (j == 0 || ops.ins) ? int(j) : kInf;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = ops.del ? int(i) : kInf;
    for (size_t j = 1; j <= m; ++j) {
      int best = kInf;
      if (x[i - 1] == y[j - 1]) {
        best = prev[j - 1];
      } else if (ops.sub) {
        best = prev[j - 1] + 1;
      }
      if (ops.del) best = std::min(best, prev[j] + 1);
      if (ops.ins) best = std::min(best, cur[j - 1] + 1);
      cur[j] = std::min(best, kInf);
    }
    std::swap(prev, cur);
  }
  if (prev[m] >= kInf) return std::nullopt;
  return prev[m];
}

int LcsLength(const TokenSequence& x, const TokenSequence& y) {
  const size_t m = y.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= x.size(); ++i) {
    for (size_t j = 1; j <= m; ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

absl::StatusOr<std::vector<TokenSequence>> EnumerateBall(
    const TokenSequence& x, int r, EditOps ops, int vocab_size,
    size_t max_elements) {
  if (r < 0) return absl::InvalidArgumentError("radius must be non-negative");
  if (vocab_size < 1) {
    return absl::InvalidArgumentError("vocabulary size must be positive");
  }
  for (Token t : x) {
    if (t < 0 || t >= vocab_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("token ", t, " outside vocabulary of size ", vocab_size));
    }
  }
  std::unordered_set<TokenSequence, SequenceHash> seen{x};
  std::vector<TokenSequence> frontier{x};
  const auto add = [&](TokenSequence&& s,
                       std::vector<TokenSequence>& next) -> absl::Status {
    if (seen.insert(s).second) {
      if (seen.size() > max_elements) {
        return absl::ResourceExhaustedError(absl::StrCat(
            "edit ball exceeds the cap of ", max_elements, " sequences"));
      }
      next.push_back(std::move(s));
    }
    return absl::OkStatus();
  };
  for (int step = 0; step < r && !frontier.empty(); ++step) {
    std::vector<TokenSequence> next;
    for (const TokenSequence& s : frontier) {
      if (ops.del) {
        for (size_t i = 0; i < s.size(); ++i) {
          TokenSequence t = s;
          t.erase(t.begin() + i);
          if (auto st = add(std::move(t), next); !st.ok()) return st;
        }
      }
      if (ops.ins) {
        for (size_t i = 0; i <= s.size(); ++i) {
          for (Token v = 0; v < vocab_size; ++v) {
            TokenSequence t = s;
            t.insert(t.begin() + i, v);
            if (auto st = add(std::move(t), next); !st.ok()) return st;
          }
        }
      }
      if (ops.sub) {
        for (size_t i = 0; i < s.size(); ++i) {
          for (Token v = 0; v < vocab_size; ++v) {
            if (v == s[i]) continue;
            TokenSequence t = s;
            t[i] = v;
            if (auto st = add(std::move(t), next); !st.ok()) return st;
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<TokenSequence> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json SequenceToJson(const TokenSequence& s) {
  return nlohmann::json(s);
}

absl::StatusOr<TokenSequence> SequenceFromJson(const nlohmann::json& j) {
  if (!j.is_array()) return absl::DataLossError("sequence must be an array");
  TokenSequence out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int64_t>() < 0 ||
        v.get<int64_t>() > std::numeric_limits<Token>::max()) {
      return absl::DataLossError("tokens must be non-negative integers");
    }
    out.push_back(v.get<Token>());
  }
  return out;
}

}  // namespace delcert
