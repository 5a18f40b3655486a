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

#include "delcert/remote_classifier.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "httplib.h"

namespace delcert {
namespace {

absl::Status TransportError(httplib::Error error, int attempts) {
  const std::string what =
      absl::StrCat(httplib::to_string(error), " after ", attempts,
                   attempts == 1 ? " attempt" : " attempts");
  switch (error) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
      return absl::DeadlineExceededError(
          absl::StrCat("remote classifier timed out or dropped: ", what));
    default:
      return absl::UnavailableError(
          absl::StrCat("remote classifier unreachable: ", what));
  }
}

}  // namespace

absl::StatusOr<std::unique_ptr<RemoteClassifier>> RemoteClassifier::Connect(
    const std::string& endpoint, RemoteOptions options) {
  if (options.max_batch < 1) {
    return absl::InvalidArgumentError("max_batch must be >= 1");
  }
  absl::string_view rest = endpoint;
  if (absl::StartsWith(rest, "http://")) rest.remove_prefix(7);
  std::string path = "/";
  if (const size_t slash = rest.find('/'); slash != absl::string_view::npos) {
    path = std::string(rest.substr(slash));
    rest = rest.substr(0, slash);
  }
  const size_t colon = rest.rfind(':');
  if (colon == absl::string_view::npos || colon == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("endpoint must be host:port, got '", endpoint, "'"));
  }
  int port = 0;
  const absl::string_view port_str = rest.substr(colon + 1);
  const auto [end, ec] = std::from_chars(
      port_str.data(), port_str.data() + port_str.size(), port);
  if (ec != std::errc() || end != port_str.data() + port_str.size() ||
      port <= 0 || port > 65535) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad port in endpoint '", endpoint, "'"));
  }

  std::unique_ptr<RemoteClassifier> rc(new RemoteClassifier(
      std::string(rest.substr(0, colon)), port, std::move(path), options));
  auto info = rc->Exchange({{"op", "info"}});
  if (!info.ok()) return info.status();
  if (!info->is_object() || !info->contains("protocol") ||
      !(*info)["protocol"].is_number_integer()) {
    return absl::AbortedError("handshake response lacks a protocol version");
  }
  if ((*info)["protocol"].get<int>() != kRemoteProtocolVersion) {
    return absl::UnimplementedError(absl::StrCat(
        "server speaks protocol ", (*info)["protocol"].get<int>(),
        ", expected ", kRemoteProtocolVersion));
  }
  if (!info->contains("num_classes") ||
      !(*info)["num_classes"].is_number_integer() ||
      (*info)["num_classes"].get<int>() < 1) {
    return absl::AbortedError("handshake response lacks num_classes");
  }
  rc->num_classes_ = (*info)["num_classes"].get<int>();
  rc->name_ = absl::StrCat("remote:", info->value("name", std::string("?")));
  return rc;
}

absl::StatusOr<nlohmann::json> RemoteClassifier::Exchange(
    const nlohmann::json& request) const {
  const std::string body = request.dump();
  const double t = options_.timeout_seconds;
  const time_t sec = static_cast<time_t>(std::floor(t));
  const time_t usec = static_cast<time_t>((t - sec) * 1e6);
  absl::Status last;
  const int attempts = std::max(0, options_.retries) + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last = TransportError(res.error(), attempt);
      continue;
    }
    if (res->status >= 500) {
      last = absl::UnavailableError(absl::StrCat(
          "remote classifier returned HTTP ", res->status, " after ", attempt,
          attempt == 1 ? " attempt" : " attempts"));
      continue;
    }
    if (res->status != 200) {
      return absl::AbortedError(
          absl::StrCat("remote classifier rejected request: HTTP ",
                       res->status, ": ", res->body));
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) {
      return absl::AbortedError("remote classifier sent invalid JSON");
    }
    return j;
  }
  return last;
}

absl::StatusOr<std::vector<int>> RemoteClassifier::ClassifyChunk(
    std::span<const TokenSequence> chunk) const {
  const std::string id = absl::StrCat("req-", next_id_++);
  nlohmann::json seqs = nlohmann::json::array();
  for (const auto& s : chunk) seqs.push_back(SequenceToJson(s));
  ++requests_;
  auto resp = Exchange({{"id", id}, {"sequences", std::move(seqs)}});
  if (!resp.ok()) return resp.status();
  if (!resp->is_object() || !resp->contains("id") ||
      !(*resp)["id"].is_string() || (*resp)["id"].get<std::string>() != id) {
    return absl::AbortedError(
        absl::StrCat("response id does not match request ", id));
  }
  if (!resp->contains("labels") || !(*resp)["labels"].is_array()) {
    return absl::AbortedError("response lacks a label array");
  }
  const auto& labels = (*resp)["labels"];
  if (labels.size() != chunk.size()) {
    return absl::AbortedError(absl::StrCat("sent ", chunk.size(),
                                           " sequences, got ", labels.size(),
                                           " labels"));
  }
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    if (!l.is_number_integer() || l.get<int>() < 0 ||
        l.get<int>() >= num_classes_) {
      return absl::AbortedError(
          absl::StrCat("invalid label in response: ", l.dump()));
    }
    out.push_back(l.get<int>());
  }
  return out;
}

absl::StatusOr<std::vector<int>> RemoteClassifier::ClassifyBatch(
    std::span<const TokenSequence> batch) const {
  if (batch.empty()) return absl::InvalidArgumentError("empty batch");
  std::vector<int> out;
  out.reserve(batch.size());
  for (size_t start = 0; start < batch.size(); start += options_.max_batch) {
    const size_t n = std::min(options_.max_batch, batch.size() - start);
    auto labels = ClassifyChunk(batch.subspan(start, n));
    if (!labels.ok()) return labels.status();
    out.insert(out.end(), labels->begin(), labels->end());
  }
  return out;
}

}  // namespace delcert
