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

// Base classifier served by another process over HTTP.
//
// Every message is a JSON object POSTed to the endpoint:
//   handshake  {"op": "info"}                 -> {"num_classes", "name", "protocol": 1}
//   classify   {"id", "sequences": [[...]]}   -> {"id", "labels": [...]}
// Unknown response fields are ignored.

#ifndef DELCERT_REMOTE_CLASSIFIER_H_
#define DELCERT_REMOTE_CLASSIFIER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "delcert/classifiers.h"
#include "json.hpp"

namespace delcert {

inline constexpr int kRemoteProtocolVersion = 1;

struct RemoteOptions {
  size_t max_batch = 256;      // sequences per request
  int retries = 2;             // extra attempts after a transport failure
  double timeout_seconds = 30.0;
};

// Error codes: Unavailable (cannot connect or server error), DeadlineExceeded
// (timed out), Aborted (malformed or mismatched response), Unimplemented
// (protocol version). Transport errors name the attempt count.
class RemoteClassifier : public BaseClassifier {
 public:
  // `endpoint` is "host:port" or "http://host:port[/path]". Performs the
  // handshake.
  static absl::StatusOr<std::unique_ptr<RemoteClassifier>> Connect(
      const std::string& endpoint, RemoteOptions options = RemoteOptions());

  absl::StatusOr<std::vector<int>> ClassifyBatch(
      std::span<const TokenSequence> batch) const override;
  int num_classes() const override { return num_classes_; }
  std::string name() const override { return name_; }
  size_t preferred_batch_size() const override { return options_.max_batch; }

  // Classification requests sent so far (handshake excluded).
  int64_t request_count() const { return requests_.load(); }

 private:
  RemoteClassifier(std::string host, int port, std::string path,
                   RemoteOptions options)
      : host_(std::move(host)),
        port_(port),
        path_(std::move(path)),
        options_(options) {}

  absl::StatusOr<nlohmann::json> Exchange(const nlohmann::json& request) const;
  absl::StatusOr<std::vector<int>> ClassifyChunk(
      std::span<const TokenSequence> chunk) const;

  std::string host_;
  int port_;
  std::string path_;
  RemoteOptions options_;
  int num_classes_ = 0;
  std::string name_;
  mutable std::atomic<int64_t> requests_{0};
  mutable std::atomic<int64_t> next_id_{0};
};

}  // namespace delcert

#endif  // DELCERT_REMOTE_CLASSIFIER_H_
