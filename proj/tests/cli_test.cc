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

// Runs the delcert binary end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "delcert/certification.h"
#include "delcert/report.h"
#include "gtest/gtest.h"
#include "testing/stub_server.h"

namespace delcert {
namespace {

namespace fs = std::filesystem;

const std::string kBin = DELCERT_BIN;
const std::string kData = DELCERT_TESTDATA;

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  // Exit code of `delcert args`; stdout and stderr land in dir_/log.
  int Run(const std::string& args, const std::string& env = "") {
    const std::string cmd = absl::StrCat(env, " ", kBin, " ", args, " > ",
                                         (dir_ / "log").string(), " 2>&1");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string Log() { return Slurp((dir_ / "log").string()); }
  std::string Out(const std::string& name) { return (dir_ / name).string(); }

  std::string CertifyArgs(const std::string& out) {
    return absl::StrCat("certify --dataset ", kData,
                        "/fixture.jsonl --classifier keyword:7 --policy ",
                        kData, "/policy.json --vocab-size 20 --no-timing",
                        " --out ", out);
  }

  fs::path dir_;
};

TEST_F(CliTest, GoldenCertifyRun) {
  ASSERT_EQ(Run(CertifyArgs(Out("run")) + " --seed 7"), 0) << Log();
  EXPECT_EQ(Slurp(Out("run/results.jsonl")),
            Slurp(kData + "/golden_results.jsonl"));
  ASSERT_EQ(Run(absl::StrCat("report --results ", Out("run/results.jsonl"),
                             " --out ", Out("run"))),
            0)
      << Log();
  EXPECT_EQ(Slurp(Out("run/curve_radius.csv")),
            Slurp(kData + "/golden_curve_radius.csv"));
  EXPECT_EQ(Slurp(Out("run/curve_log10_cc.csv")),
            Slurp(kData + "/golden_curve_log10_cc.csv"));
  EXPECT_TRUE(fs::exists(Out("run/summary.json")));
}

TEST_F(CliTest, GoldenRunInvariants) {
  auto records = RecordsFromJsonl(Slurp(kData + "/golden_results.jsonl"));
  ASSERT_TRUE(records.ok());
  ASSERT_EQ(records->size(), 50u);
  int wrong = 0;
  for (const CertRecord& r : *records) {
    if (!r.correct()) {
      ++wrong;
      EXPECT_EQ(r.radius, 0);
      EXPECT_EQ(r.log10_cc, 0.0);
    }
  }
  EXPECT_GT(wrong, 0);
  for (const char* name : {"golden_curve_radius.csv", "golden_curve_log10_cc.csv"}) {
    std::vector<std::string> lines =
        absl::StrSplit(Slurp(kData + "/" + name), '\n', absl::SkipEmpty());
    ASSERT_GT(lines.size(), 2u);
    double previous = 2;
    for (size_t i = 1; i < lines.size(); ++i) {
      std::vector<std::string> cells = absl::StrSplit(lines[i], ',');
      const double acc = std::stod(cells[1]);
      EXPECT_LE(acc, previous) << name << " row " << i;
      previous = acc;
    }
  }
}

TEST_F(CliTest, WorkersDoNotChangeResults) {
  ASSERT_EQ(Run(CertifyArgs(Out("w3")) + " --seed 7 --workers 3"), 0) << Log();
  EXPECT_EQ(Slurp(Out("w3/results.jsonl")),
            Slurp(kData + "/golden_results.jsonl"));
}

TEST_F(CliTest, SeedFromEnvironment) {
  ASSERT_EQ(Run(CertifyArgs(Out("env")), "DELCERT_SEED=7"), 0) << Log();
  EXPECT_EQ(Slurp(Out("env/results.jsonl")),
            Slurp(kData + "/golden_results.jsonl"));
}

TEST_F(CliTest, RemoteClassifierMatchesBuiltin) {
  testing::StubServer::Behavior b;
  b.label = [](const TokenSequence& s) {
    return std::find(s.begin(), s.end(), 7) != s.end() ? 1 : 0;
  };
  testing::StubServer server(b);
  const std::string args = absl::StrCat(
      "certify --dataset ", kData, "/fixture.jsonl --classifier remote",
      " --endpoint ", server.endpoint(), " --max-batch 300 --policy ", kData,
      "/policy.json --vocab-size 20 --no-timing --seed 7 --out ", Out("remote"));
  ASSERT_EQ(Run(args), 0) << Log();
  EXPECT_EQ(Slurp(Out("remote/results.jsonl")),
            Slurp(kData + "/golden_results.jsonl"));
  EXPECT_LE(server.max_seen_batch(), 300u);
}

TEST_F(CliTest, UnreachableRemoteIsTransportError) {
  int port;
  {
    testing::StubServer server({});
    port = server.port();
  }
  const std::string args = absl::StrCat(
      "certify --dataset ", kData, "/fixture.jsonl --classifier remote",
      " --endpoint 127.0.0.1:", port, " --policy ", kData,
      "/policy.json --seed 1 --out ", Out("x"));
  EXPECT_EQ(Run(args), 4) << Log();
}

TEST_F(CliTest, ConfigAndIoErrors) {
  EXPECT_EQ(Run(absl::StrCat("certify --dataset ", Out("missing.jsonl"),
                             " --policy ", kData, "/policy.json --seed 1")),
            3)
      << Log();
  EXPECT_EQ(Run(absl::StrCat("certify --dataset ", kData,
                             "/fixture.jsonl --policy '{\"kind\":\"nope\"}'",
                             " --seed 1 --out ", Out("bad"))),
            2)
      << Log();
  EXPECT_EQ(Run(absl::StrCat("calibrate --dataset ", kData,
                             "/fixture.jsonl --classifier keyword:7 --seed 1",
                             " --tol 0 --out ", Out("cal"))),
            2)
      << Log();
  EXPECT_NE(Run("certify --policy x"), 0);
}

TEST_F(CliTest, CalibrateThenCertify) {
  ASSERT_EQ(Run(absl::StrCat("calibrate --dataset ", kData,
                             "/fixture.jsonl --classifier keyword:7 --seed 3",
                             " --min-count 10 --m 10 --tau 0.5 --vocab-size 20",
                             " --out ", Out("cal"))),
            0)
      << Log();
  ASSERT_TRUE(fs::exists(Out("cal/policy.json")));
  ASSERT_TRUE(fs::exists(Out("cal/calibration.json")));
  auto policy =
      DeletionPolicy::FromJson(nlohmann::json::parse(Slurp(Out("cal/policy.json"))));
  ASSERT_TRUE(policy.ok()) << policy.status();
  EXPECT_EQ(Run(absl::StrCat("certify --dataset ", kData,
                             "/fixture.jsonl --classifier keyword:7 --policy ",
                             Out("cal/policy.json"), " --seed 3 --out ",
                             Out("cert"))),
            0)
      << Log();
}

TEST_F(CliTest, CalibrateAcceptsSuppliedBins) {
  ASSERT_EQ(Run(absl::StrCat("calibrate --dataset ", kData,
                             "/fixture.jsonl --classifier keyword:7 --seed 3",
                             " --bins [0,137,230,324,inf] --m 5 --out ",
                             Out("cal"))),
            0)
      << Log();
  auto j = nlohmann::json::parse(Slurp(Out("cal/policy.json")));
  EXPECT_EQ(j["boundaries"].size(), 5u);
  EXPECT_EQ(j["boundaries"][2], 230);
}

TEST_F(CliTest, OracleCheck) {
  ASSERT_EQ(Run("oracle-check --tables 5 --lengths 4,5 --seed 2 --out " +
                Out("oracle.jsonl")),
            0)
      << Log();
  auto summary = nlohmann::json::parse(Log());
  EXPECT_EQ(summary["violations"], 0);
  EXPECT_GT(summary["checks"].get<int>(), 100);
  EXPECT_TRUE(fs::exists(Out("oracle.jsonl")));
  EXPECT_EQ(Run("oracle-check --tables 2 --lengths 4 --corrupt-lb 0.5"), 6)
      << Log();
  EXPECT_EQ(Run("oracle-check --tables 1 --lengths 21 --r 2"), 5) << Log();
}

TEST_F(CliTest, ReportErrors) {
  std::ofstream(Out("empty.jsonl")).close();
  EXPECT_EQ(Run("report --results " + Out("empty.jsonl")), 3) << Log();
  EXPECT_EQ(Run("report --results " + Out("absent.jsonl")), 3) << Log();
}

}  // namespace
}  // namespace delcert
