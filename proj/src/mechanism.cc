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

#include "delcert/mechanism.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "absl/strings/str_cat.h"

namespace delcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

absl::StatusOr<double> BoundaryFromJson(const nlohmann::json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kInf;
  if (v.is_number()) return v.get<double>();
  return absl::InvalidArgumentError(
      "bin boundaries must be numbers or the string \"inf\"");
}

}  // namespace

size_t BinnedRate::BinIndex(size_t length) const {
  const double len = static_cast<double>(length);
  // upper_bound finds the first boundary > len; the bin starts one before it.
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), len);
  size_t bin = static_cast<size_t>(it - boundaries.begin());
  bin = bin == 0 ? 0 : bin - 1;
  return std::min(bin, expected_lengths.size() - 1);
}

absl::StatusOr<DeletionPolicy> DeletionPolicy::Fixed(double p_del) {
  if (!(p_del >= 0.0 && p_del < 1.0)) {
    return absl::InvalidArgumentError("fixed deletion rate must lie in [0, 1)");
  }
  return DeletionPolicy(FixedRate{p_del});
}

absl::StatusOr<DeletionPolicy> DeletionPolicy::LengthDependent(double p_lb,
                                                               double p,
                                                               int k) {
  if (!IsProbability(p_lb) || !IsProbability(p) || p_lb > p) {
    return absl::InvalidArgumentError("require 0 <= p_lb <= p <= 1");
  }
  if (k <= 0) return absl::InvalidArgumentError("k must be positive");
  return DeletionPolicy(LengthDependentRate{p_lb, p, k});
}

absl::StatusOr<DeletionPolicy> DeletionPolicy::Binned(
    std::vector<double> boundaries, std::vector<double> expected_lengths) {
  if (boundaries.size() < 2) {
    return absl::InvalidArgumentError("binned policy needs at least one bin");
  }
  if (boundaries.front() != 0.0) {
    return absl::InvalidArgumentError("first bin boundary must be 0");
  }
  if (!std::isinf(boundaries.back())) {
    return absl::InvalidArgumentError("last bin boundary must be inf");
  }
  for (size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i] > boundaries[i - 1])) {
      return absl::InvalidArgumentError(
          "bin boundaries must be strictly ascending");
    }
  }
  if (expected_lengths.size() != boundaries.size() - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", boundaries.size() - 1, " per-bin lengths, got ",
        expected_lengths.size()));
  }
  for (double k : expected_lengths) {
    if (!(k > 0.0) || std::isinf(k)) {
      return absl::InvalidArgumentError(
          "per-bin expected lengths must be positive and finite");
    }
  }
  return DeletionPolicy(
      BinnedRate{std::move(boundaries), std::move(expected_lengths)});
}

absl::StatusOr<DeletionPolicy> DeletionPolicy::AdaptDel(double p_del,
                                                        double mean_length) {
  // The small slack keeps products like 0.1 * 230 from flooring to 22.
  const int k =
      static_cast<int>(std::floor((1.0 - p_del) * mean_length + 1e-9));
  return LengthDependent(p_del, 1.0, k);
}

absl::StatusOr<DeletionPolicy> DeletionPolicy::FromJson(
    const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    return absl::InvalidArgumentError("policy JSON needs a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "fixed") return Fixed(j.at("p_del").get<double>());
    if (kind == "length_dependent") {
      return LengthDependent(j.at("p_lb").get<double>(),
                             j.value("p", 1.0), j.at("k").get<int>());
    }
    if (kind == "binned") {
      std::vector<double> boundaries;
      for (const auto& v : j.at("boundaries")) {
        auto b = BoundaryFromJson(v);
        if (!b.ok()) return b.status();
        boundaries.push_back(*b);
      }
      return Binned(std::move(boundaries),
                    j.at("K").get<std::vector<double>>());
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed ", kind, " policy: ", e.what()));
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown policy kind '", kind, "'"));
}

nlohmann::json DeletionPolicy::ToJson() const {
  struct Visitor {
    nlohmann::json operator()(const FixedRate& f) const {
      return {{"kind", "fixed"}, {"p_del", f.p_del}};
    }
    nlohmann::json operator()(const LengthDependentRate& l) const {
      return {{"kind", "length_dependent"},
              {"p_lb", l.p_lb},
              {"p", l.p},
              {"k", l.k}};
    }
    nlohmann::json operator()(const BinnedRate& b) const {
      nlohmann::json bounds = nlohmann::json::array();
      for (double v : b.boundaries) {
        if (std::isinf(v)) {
          bounds.push_back("inf");
        } else {
          bounds.push_back(v);
        }
      }
      return {{"kind", "binned"}, {"boundaries", bounds},
              {"K", b.expected_lengths}};
    }
  };
  return std::visit(Visitor{}, params_);
}

absl::StatusOr<double> DeletionPolicy::Rate(size_t length) const {
  if (const auto* f = std::get_if<FixedRate>(&params_)) return f->p_del;
  if (length == 0) {
    return absl::InvalidArgumentError(
        "length-dependent deletion rate undefined for an empty sequence");
  }
  const double len = static_cast<double>(length);
  if (const auto* l = std::get_if<LengthDependentRate>(&params_)) {
    return std::max(l->p_lb, l->p * (1.0 - l->k / len));
  }
  const auto& b = std::get<BinnedRate>(params_);
  return std::max(0.0, 1.0 - b.expected_lengths[b.BinIndex(length)] / len);
}

DeletionMask::DeletionMask(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
  retained_ = static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

DeletionMask DeletionMask::FromBits(uint64_t pattern, size_t length) {
  std::vector<uint8_t> bits(length);
  for (size_t i = 0; i < length; ++i) bits[i] = (pattern >> i) & 1;
  return DeletionMask(std::move(bits));
}

DeletionMask SampleMask(double rate, size_t length, BitGen& gen) {
  std::vector<uint8_t> bits(length);
  for (auto& b : bits) b = UniformUnit(gen) < rate ? 0 : 1;
  return DeletionMask(std::move(bits));
}

TokenSequence SampleDeletion(const TokenSequence& x, double rate, BitGen& gen) {
  TokenSequence out;
  out.reserve(x.size());
  for (Token t : x) {
    if (!(UniformUnit(gen) < rate)) out.push_back(t);
  }
  return out;
}

absl::StatusOr<TokenSequence> ApplyMask(const TokenSequence& x,
                                        const DeletionMask& mask) {
  if (mask.size() != x.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mask has ", mask.size(), " bits for a sequence of length ", x.size()));
  }
  TokenSequence out;
  out.reserve(mask.retained_count());
  for (size_t i = 0; i < x.size(); ++i) {
    if (mask.bits()[i]) out.push_back(x[i]);
  }
  return out;
}

double MaskPmf(const DeletionMask& mask, double rate) {
  double log_p = 0.0;
  if (mask.deleted_count() > 0) log_p += mask.deleted_count() * std::log(rate);
  if (mask.retained_count() > 0) {
    log_p += mask.retained_count() * std::log1p(-rate);
  }
  return std::exp(log_p);
}

}  // namespace delcert
