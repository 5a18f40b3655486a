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

#include "delcert/certification.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/strings/str_cat.h"
#include "delcert/estimation.h"

namespace delcert {
namespace {

absl::Status CheckCertInputs(double t1_lb, double t2_ub, EditOps ops,
                             int r_max) {
  if (r_max < 0) return absl::InvalidArgumentError("r_max must be >= 0");
  if (!(t1_lb >= 0 && t1_lb <= 1 && t2_ub >= 0 && t2_ub <= 1)) {
    return absl::InvalidArgumentError("score bounds must lie in [0, 1]");
  }
  if (!ops.any()) {
    return absl::InvalidArgumentError("at least one edit operation required");
  }
  return absl::OkStatus();
}

absl::StatusOr<double> CertRate(const DeletionPolicy& policy, int length) {
  auto rate = SmoothingRate(policy, static_cast<size_t>(length));
  if (!rate.ok()) return rate.status();
  if (*rate >= 1.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "deletion rate 1 at length ", length, " leaves nothing to certify"));
  }
  return *rate;
}

}  // namespace

std::vector<EditComposition> EditCompositions(EditOps ops, int r) {
  std::vector<EditComposition> out;
  if (r < 0) return out;
  for (int d = ops.del ? r : 0; d >= 0; --d) {
    for (int i = ops.ins ? r - d : 0; i >= 0; --i) {
      const int s = r - d - i;
      if (s > 0 && !ops.sub) continue;
      out.push_back({d, i, s});
    }
  }
  return out;
}

absl::StatusOr<std::optional<PairwiseGeometry>> WorstCaseGeometry(
    int len_x, const EditComposition& comp, const DeletionPolicy& policy) {
  const int len_xp = len_x + comp.n_ins - comp.n_del;
  const int len_lcs = len_x - comp.n_del - comp.n_sub;
  if (len_xp < 0 || len_lcs < 0) return std::optional<PairwiseGeometry>();
  auto psi = CertRate(policy, len_x);
  if (!psi.ok()) return psi.status();
  auto psi_p = CertRate(policy, len_xp);
  if (!psi_p.ok()) return psi_p.status();
  return std::optional<PairwiseGeometry>(
      PairwiseGeometry{len_x, len_xp, len_lcs, *psi, *psi_p});
}

absl::StatusOr<std::optional<int>> CertifyRadius(
    double t1_lb, double t2_ub, int len_x, const DeletionPolicy& policy,
    EditOps ops, int r_max) {
  if (auto s = CheckCertInputs(t1_lb, t2_ub, ops, r_max); !s.ok()) return s;
  if (!(t1_lb > t2_ub)) return std::optional<int>();
  auto psi = CertRate(policy, len_x);
  if (!psi.ok()) return psi.status();
  NeighborBounds bounds(t1_lb, t2_ub, len_x, *psi);
  for (int d = 1; d <= r_max; ++d) {
    for (const EditComposition& comp : EditCompositions(ops, d)) {
      auto g = WorstCaseGeometry(len_x, comp, policy);
      if (!g.ok()) return g.status();
      if (!g->has_value()) continue;
      const PairwiseGeometry& geo = **g;
      if (!bounds.Separated(geo.len_xp, geo.psi_p, geo.len_lcs)) {
        return std::optional<int>(d - 1);
      }
    }
  }
  return std::optional<int>(r_max);
}

absl::StatusOr<std::optional<int>> CertifyGeneral(
    double t1_lb, double t2_ub, const TokenSequence& x,
    const DeletionPolicy& policy, EditOps ops, int vocab_size, int r_max,
    size_t ball_cap) {
  if (auto s = CheckCertInputs(t1_lb, t2_ub, ops, r_max); !s.ok()) return s;
  if (!(t1_lb > t2_ub)) return std::optional<int>();
  const int len_x = static_cast<int>(x.size());
  auto psi = CertRate(policy, len_x);
  if (!psi.ok()) return psi.status();
  auto ball = EnumerateBall(x, r_max, ops, vocab_size, ball_cap);
  if (!ball.ok()) return ball.status();

  NeighborBounds bounds(t1_lb, t2_ub, len_x, *psi);
  int radius = r_max;
  for (const TokenSequence& xp : *ball) {
    const int d = *EditDistance(x, xp, ops);
    if (d == 0 || d - 1 >= radius) continue;
    const int len_xp = static_cast<int>(xp.size());
    auto psi_p = CertRate(policy, len_xp);
    if (!psi_p.ok()) return psi_p.status();
    const int lcs = LcsLength(x, xp);
    if (!bounds.Separated(len_xp, *psi_p, lcs)) {
      radius = d - 1;
    }
  }
  return std::optional<int>(radius);
}

absl::StatusOr<std::optional<int>> CertifyGeneralFromScores(
    std::span<const double> scores, const TokenSequence& x,
    const DeletionPolicy& policy, EditOps ops, int vocab_size, int r_max,
    size_t ball_cap) {
  if (scores.empty()) return absl::InvalidArgumentError("no class scores");
  const size_t top = static_cast<size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  double runner_up = 0.0;
  for (size_t y = 0; y < scores.size(); ++y) {
    if (y != top) runner_up = std::max(runner_up, scores[y]);
  }
  return CertifyGeneral(scores[top], runner_up, x, policy, ops, vocab_size,
                        r_max, ball_cap);
}

double RegionLogCardinality(int len_x, int r, EditOps ops, int vocab_size) {
  if (r <= 0) return 0.0;
  double best = 0.0;
  if (ops.sub && vocab_size >= 2) {
    const double log_alt = std::log10(vocab_size - 1.0);
    for (int j = 1; j <= std::min(r, len_x); ++j) {
      best = std::max(best, LogBinomialCoefficient(len_x, j) / std::log(10.0) +
                                j * log_alt);
    }
  }
  if (ops.ins) best = std::max(best, r * std::log10(vocab_size));
  if (ops.del) best = std::max(best, std::log10(std::min(r, len_x) + 1.0));
  return best;
}

absl::StatusOr<CertifyResult> Certify(const BaseClassifier& base,
                                      const TokenSequence& x,
                                      const DeletionPolicy& policy,
                                      const CertifyOptions& options,
                                      BitGen& prediction_gen,
                                      BitGen& certification_gen) {
  const int len_x = static_cast<int>(x.size());
  const int r_max = options.r_max.value_or(len_x);
  if (r_max < 0) return absl::InvalidArgumentError("r_max must be >= 0");

  auto pred = Predict(base, x, policy, options.n_pred, prediction_gen);
  if (!pred.ok()) return pred.status();
  auto cb = EstimateCertBounds(base, x, policy, pred->label, options.n_cert,
                               options.alpha, certification_gen);
  if (!cb.ok()) return cb.status();

  CertifyResult out;
  out.label = pred->label;
  Certificate& cert = out.certificate;
  cert.ops = options.ops;
  cert.alpha = options.alpha;
  cert.t1_lb = cb->t1_lb;
  cert.t2_ub = cb->t2_ub;
  if (cb->disagreement) return out;

  auto radius =
      CertifyRadius(cb->t1_lb, cb->t2_ub, len_x, policy, options.ops, r_max);
  if (!radius.ok()) return radius.status();
  cert.radius = *radius;
  cert.log10_cardinality = RegionLogCardinality(
      len_x, cert.reported_radius(), options.ops, options.vocab_size);
  return out;
}

CertRecord CertRecord::FromResult(int64_t index, int true_label,
                                  int64_t length, const CertifyResult& result,
                                  double seconds) {
  CertRecord rec;
  rec.index = index;
  rec.true_label = true_label;
  rec.predicted_label = result.label;
  rec.t1_lb = result.certificate.t1_lb;
  rec.t2_ub = result.certificate.t2_ub;
  rec.length = length;
  rec.seconds = seconds;
  if (rec.correct()) {
    rec.radius = result.certificate.reported_radius();
    rec.log10_cc = result.certificate.log10_cardinality;
  }
  return rec;
}

nlohmann::ordered_json CertRecord::ToJson() const {
  nlohmann::ordered_json j;
  j["index"] = index;
  j["true_label"] = true_label;
  j["predicted_label"] = predicted_label;
  j["radius"] = radius;
  j["log10_cc"] = log10_cc;
  j["t1_lb"] = t1_lb;
  j["t2_ub"] = t2_ub;
  j["length"] = length;
  j["seconds"] = seconds;
  return j;
}

absl::StatusOr<CertRecord> CertRecord::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) return absl::DataLossError("record is not an object");
  CertRecord rec;
  try {
    rec.index = j.at("index").get<int64_t>();
    rec.true_label = j.at("true_label").get<int>();
    rec.predicted_label = j.at("predicted_label").get<int>();
    rec.radius = j.at("radius").get<int>();
    rec.log10_cc = j.at("log10_cc").get<double>();
    rec.t1_lb = j.value("t1_lb", 0.0);
    rec.t2_ub = j.value("t2_ub", 0.0);
    rec.length = j.at("length").get<int64_t>();
    rec.seconds = j.value("seconds", 0.0);
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(absl::StrCat("bad record: ", e.what()));
  }
  return rec;
}

}  // namespace delcert
