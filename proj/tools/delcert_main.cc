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

// delcert: certify, calibrate, oracle-check and report.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "delcert/calibration.h"
#include "delcert/certification.h"
#include "delcert/classifiers.h"
#include "delcert/core.h"
#include "delcert/dataset.h"
#include "delcert/mechanism.h"
#include "delcert/oracle.h"
#include "delcert/parallel.h"
#include "delcert/random.h"
#include "delcert/remote_classifier.h"
#include "delcert/report.h"
#include "json.hpp"

namespace delcert {
namespace {

enum ExitCode {
  kOk = 0,
  kOther = 1,
  kConfig = 2,
  kIo = 3,
  kTransport = 4,
  kBudget = 5,
  kValidation = 6,
};

int ExitCodeFor(const absl::Status& s) {
  switch (s.code()) {
    case absl::StatusCode::kOk:
      return kOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
      return kConfig;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kPermissionDenied:
      return kIo;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDeadlineExceeded:
    case absl::StatusCode::kAborted:
    case absl::StatusCode::kUnimplemented:
      return kTransport;
    case absl::StatusCode::kResourceExhausted:
      return kBudget;
    default:
      return kOther;
  }
}

int Fail(const absl::Status& s) {
  std::cerr << "delcert: " << s.message() << "\n";
  return ExitCodeFor(s);
}

// Flags shared by the commands that query a classifier.
struct ModelFlags {
  std::string dataset;
  std::string format = "auto";
  std::string vocab_path;
  int vocab_size = 0;
  std::string classifier = "constant:0";
  std::string endpoint;
  size_t max_batch = 256;
  std::string ops = "del,ins,sub";
  double alpha = 0.05;
  int64_t n_pred = 1000;
  int64_t n_cert = 4000;
  uint64_t seed = 0;
  int workers = 1;
  std::string out = ".";
};

void AddModelFlags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--dataset", f.dataset, "JSONL dataset")->required();
  cmd->add_option("--format", f.format, "auto | text | tokens")
      ->capture_default_str();
  cmd->add_option("--vocab", f.vocab_path, "token table to load first");
  cmd->add_option("--vocab-size", f.vocab_size,
                  "vocabulary size for cardinality (default: from data)");
  cmd->add_option("--classifier", f.classifier,
                  "constant:L[:C] | keyword:TOKS[:T] | hash:SEED:C | remote")
      ->capture_default_str();
  cmd->add_option("--endpoint", f.endpoint, "host:port of a remote classifier");
  cmd->add_option("--max-batch", f.max_batch, "sequences per remote request")
      ->capture_default_str();
  cmd->add_option("--ops", f.ops, "edit operations")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "significance level")
      ->capture_default_str();
  cmd->add_option("--n-pred", f.n_pred, "prediction samples")
      ->capture_default_str();
  cmd->add_option("--n-cert", f.n_cert, "certification samples")
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "master seed")->required();
  cmd->add_option("--workers", f.workers, "parallel inputs")
      ->capture_default_str();
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

absl::Status CheckModelFlags(const ModelFlags& f) {
  if (!(f.alpha > 0.0 && f.alpha < 1.0)) {
    return absl::InvalidArgumentError("--alpha must lie in (0, 1)");
  }
  if (f.n_pred < 1 || f.n_cert < 1) {
    return absl::InvalidArgumentError("--n-pred and --n-cert must be >= 1");
  }
  if (f.workers < 1) return absl::InvalidArgumentError("--workers must be >= 1");
  if (f.max_batch < 1) {
    return absl::InvalidArgumentError("--max-batch must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> LoadModelDataset(const ModelFlags& f) {
  auto format = ParseDatasetFormat(f.format);
  if (!format.ok()) return format.status();
  Vocabulary vocab;
  if (!f.vocab_path.empty()) {
    auto v = LoadVocabulary(f.vocab_path);
    if (!v.ok()) return v.status();
    vocab = *std::move(v);
  }
  auto ds = LoadDataset(f.dataset, *format, std::move(vocab));
  if (!ds.ok()) return ds.status();
  if (ds->examples.empty()) {
    return absl::DataLossError(absl::StrCat(f.dataset, " has no examples"));
  }
  return ds;
}

absl::StatusOr<std::unique_ptr<BaseClassifier>> MakeClassifier(
    const ModelFlags& f, const Vocabulary& vocab) {
  if (f.classifier == "remote") {
    if (f.endpoint.empty()) {
      return absl::InvalidArgumentError("--classifier remote needs --endpoint");
    }
    RemoteOptions opts;
    opts.max_batch = f.max_batch;
    auto rc = RemoteClassifier::Connect(f.endpoint, opts);
    if (!rc.ok()) return rc.status();
    return std::unique_ptr<BaseClassifier>(std::move(*rc));
  }
  return MakeBuiltinClassifier(f.classifier, &vocab);
}

absl::StatusOr<DeletionPolicy> LoadPolicy(const std::string& spec) {
  std::string text = spec;
  const size_t first = spec.find_first_not_of(" \t\n");
  if (first == std::string::npos || spec[first] != '{') {
    auto contents = ReadFile(spec);
    if (!contents.ok()) return contents.status();
    text = *std::move(contents);
  }
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError("policy is not valid JSON");
  }
  return DeletionPolicy::FromJson(j);
}

absl::Status EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

std::string Join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

absl::StatusOr<std::vector<double>> ParseDoubles(const std::string& list) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(list, ',', absl::SkipEmpty())) {
    double v;
    if (part == "inf" || part == "\"inf\"") {
      v = std::numeric_limits<double>::infinity();
    } else if (!absl::SimpleAtod(part, &v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("not a number: '", part, "'"));
    }
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- certify

struct CertifyFlags {
  ModelFlags model;
  std::string policy;
  int r_max = -1;
  bool no_timing = false;
};

int RunCertify(const CertifyFlags& f) {
  if (auto s = CheckModelFlags(f.model); !s.ok()) return Fail(s);
  auto ops = EditOps::Parse(f.model.ops);
  if (!ops.ok()) return Fail(ops.status());
  auto policy = LoadPolicy(f.policy);
  if (!policy.ok()) return Fail(policy.status());
  auto ds = LoadModelDataset(f.model);
  if (!ds.ok()) return Fail(ds.status());
  auto clf = MakeClassifier(f.model, ds->vocab);
  if (!clf.ok()) return Fail(clf.status());
  if (auto s = EnsureDir(f.model.out); !s.ok()) return Fail(s);

  CertifyOptions opts;
  opts.ops = *ops;
  opts.alpha = f.model.alpha;
  opts.n_pred = f.model.n_pred;
  opts.n_cert = f.model.n_cert;
  if (f.r_max >= 0) opts.r_max = f.r_max;
  opts.vocab_size = std::max(f.model.vocab_size, ds->vocab.size());

  const auto& examples = ds->examples;
  std::vector<CertRecord> records(examples.size());
  std::vector<absl::Status> errors(examples.size());
  ParallelFor(examples.size(), f.model.workers, [&](size_t i) {
    BitGen pred = MakeStream(f.model.seed, Stream::kPrediction, i);
    BitGen cert = MakeStream(f.model.seed, Stream::kCertification, i);
    const auto start = std::chrono::steady_clock::now();
    auto res = Certify(**clf, examples[i].tokens, *policy, opts, pred, cert);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    if (!res.ok()) {
      errors[i] = res.status();
      return;
    }
    records[i] = CertRecord::FromResult(
        static_cast<int64_t>(i), examples[i].label,
        static_cast<int64_t>(examples[i].tokens.size()), *res,
        f.no_timing ? 0.0 : elapsed.count());
  });
  for (size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].ok()) {
      return Fail(absl::Status(
          errors[i].code(),
          absl::StrCat("input ", i, ": ", errors[i].message())));
    }
  }

  if (auto s = WriteFile(Join(f.model.out, "results.jsonl"),
                         RecordsToJsonl(records));
      !s.ok()) {
    return Fail(s);
  }
  if (ds->vocab.has_table()) {
    if (auto s = SaveVocabulary(ds->vocab, Join(f.model.out, "vocab.json"));
        !s.ok()) {
      return Fail(s);
    }
  }
  auto summary = Summarize(records);
  if (!summary.ok()) return Fail(summary.status());
  const std::string summary_text = summary->ToJson().dump(2) + "\n";
  if (auto s = WriteFile(Join(f.model.out, "summary.json"), summary_text);
      !s.ok()) {
    return Fail(s);
  }
  std::cout << summary_text;
  return kOk;
}

// -------------------------------------------------------------- calibrate

struct CalibrateFlags {
  ModelFlags model;
  std::string bins;
  int min_count = 25;
  double outlier_pct = 1.0;
  double tau = 0.5;
  double tol = 1.0;
  int m = 100;
  double p_lb = 0.9;
};

int RunCalibrate(const CalibrateFlags& f) {
  if (auto s = CheckModelFlags(f.model); !s.ok()) return Fail(s);
  if (!(f.tol > 0.0)) {
    return Fail(absl::InvalidArgumentError("--tol must be > 0"));
  }
  if (f.m < 1) return Fail(absl::InvalidArgumentError("--m must be >= 1"));
  if (!(f.tau >= 0.0 && f.tau <= 1.0)) {
    return Fail(absl::InvalidArgumentError("--tau must lie in [0, 1]"));
  }
  auto ops = EditOps::Parse(f.model.ops);
  if (!ops.ok()) return Fail(ops.status());
  auto ds = LoadModelDataset(f.model);
  if (!ds.ok()) return Fail(ds.status());
  auto clf = MakeClassifier(f.model, ds->vocab);
  if (!clf.ok()) return Fail(clf.status());
  if (auto s = EnsureDir(f.model.out); !s.ok()) return Fail(s);

  BinSpec bins;
  if (!f.bins.empty()) {
    std::string list = f.bins;
    list.erase(std::remove_if(list.begin(), list.end(),
                              [](char c) {
                                return c == '[' || c == ']' || c == ' ';
                              }),
               list.end());
    auto edges = ParseDoubles(list);
    if (!edges.ok()) return Fail(edges.status());
    bins.boundaries = *std::move(edges);
    // Validates the boundaries the same way the policy will.
    auto check = DeletionPolicy::Binned(
        bins.boundaries, std::vector<double>(bins.boundaries.size() - 1, 1.0));
    if (bins.boundaries.size() < 2 || !check.ok()) {
      return Fail(check.ok() ? absl::InvalidArgumentError("need >= 2 edges")
                             : check.status());
    }
  } else {
    std::vector<int64_t> lengths;
    for (const auto& e : ds->examples) {
      lengths.push_back(static_cast<int64_t>(e.tokens.size()));
    }
    auto created = CreateBins(lengths, f.min_count, f.outlier_pct);
    if (!created.ok()) return Fail(created.status());
    bins = *std::move(created);
  }

  CalibrationOptions opts;
  opts.ops = *ops;
  opts.alpha = f.model.alpha;
  opts.n_pred = f.model.n_pred;
  opts.n_cert = f.model.n_cert;
  opts.vocab_size = std::max(f.model.vocab_size, ds->vocab.size());
  opts.tau = f.tau;
  opts.tol = f.tol;
  opts.m = f.m;
  opts.p_lb = f.p_lb;
  opts.workers = f.model.workers;
  opts.seed = f.model.seed;

  auto result = OptimizeExpectedLengths(**clf, ds->examples, bins, opts);
  if (!result.ok()) return Fail(result.status());
  for (const auto& w : result->warnings) std::cerr << "warning: " << w << "\n";
  auto policy = result->ToPolicy();
  if (!policy.ok()) return Fail(policy.status());
  const std::string policy_text = policy->ToJson().dump(2) + "\n";
  if (auto s = WriteFile(Join(f.model.out, "policy.json"), policy_text);
      !s.ok()) {
    return Fail(s);
  }
  if (auto s = WriteFile(Join(f.model.out, "calibration.json"),
                         result->DiagnosticsJson().dump(2) + "\n");
      !s.ok()) {
    return Fail(s);
  }
  std::cout << policy_text;
  return kOk;
}

// ----------------------------------------------------------- oracle-check

struct OracleFlags {
  std::string lengths = "4,5,6";
  int vocab_size = 2;
  int radius = 2;
  std::string ops = "del,ins,sub";
  int tables = 100;
  int classes = 2;
  std::string rates = "0.5,0.7,0.9";
  uint64_t seed = 0;
  std::string out;
  double corrupt_lb = 0.0;
};

int RunOracleCheck(const OracleFlags& f) {
  auto ops = EditOps::Parse(f.ops);
  if (!ops.ok()) return Fail(ops.status());
  auto lengths = ParseDoubles(f.lengths);
  if (!lengths.ok()) return Fail(lengths.status());
  auto rates = ParseDoubles(f.rates);
  if (!rates.ok()) return Fail(rates.status());
  if (f.vocab_size < 1 || f.radius < 0 || f.tables < 1 || f.classes < 1) {
    return Fail(absl::InvalidArgumentError(
        "--vocab-size, --tables and --classes must be >= 1, --r >= 0"));
  }
  for (double r : *rates) {
    if (!(r >= 0.0 && r < 1.0)) {
      return Fail(absl::InvalidArgumentError("rates must lie in [0, 1)"));
    }
  }
  for (double len : *lengths) {
    if (len < 0 || len != std::floor(len)) {
      return Fail(absl::InvalidArgumentError("lengths must be integers"));
    }
    if (len + f.radius > kMaxExactLength) {
      return Fail(absl::ResourceExhaustedError(absl::StrCat(
          "|x| + r = ", len + f.radius, " exceeds the exact-oracle budget of ",
          kMaxExactLength)));
    }
  }

  std::string report_lines;
  int64_t checks = 0;
  int64_t violations = 0;
  double min_lb = std::numeric_limits<double>::infinity();
  double min_ub = std::numeric_limits<double>::infinity();
  ValidationOptions vopts;
  vopts.lb_offset = f.corrupt_lb;
  for (int t = 0; t < f.tables; ++t) {
    BitGen gen = MakeStream(f.seed, Stream::kSampling, t);
    const double p_first = 0.2 + 0.6 * UniformUnit(gen);
    auto clf = MakeRandomTableClassifier(gen(), f.classes, p_first);
    for (double len : *lengths) {
      TokenSequence x(static_cast<size_t>(len));
      for (auto& tok : x) tok = static_cast<Token>(UniformIndex(gen, f.vocab_size));
      for (double psi : *rates) {
        for (double psi_p : *rates) {
          const RateFunction rate = [&x, psi, psi_p](const TokenSequence& s) {
            return s == x ? psi : psi_p;
          };
          auto rep = ValidateBounds(*clf, x, rate, *ops, f.radius,
                                    f.vocab_size, vopts);
          if (!rep.ok()) return Fail(rep.status());
          checks += static_cast<int64_t>(rep->checks.size());
          violations += rep->violations();
          min_lb = std::min(min_lb, rep->min_lb_margin());
          min_ub = std::min(min_ub, rep->min_ub_margin());
          if (!f.out.empty()) {
            for (const auto& c : rep->checks) {
              nlohmann::ordered_json j;
              j["table"] = t;
              j["x"] = SequenceToJson(x);
              j["psi"] = psi;
              j.update(c.ToJson());
              j["ok"] = c.ok(rep->slack);
              absl::StrAppend(&report_lines, j.dump(), "\n");
            }
          }
        }
      }
    }
  }
  if (!f.out.empty()) {
    if (auto s = WriteFile(f.out, report_lines); !s.ok()) return Fail(s);
  }
  nlohmann::ordered_json summary;
  summary["checks"] = checks;
  summary["violations"] = violations;
  summary["min_lb_margin"] = min_lb;
  summary["min_ub_margin"] = min_ub;
  std::cout << summary.dump() << "\n";
  if (violations > 0) {
    std::cerr << "delcert: " << violations << " bound violations\n";
    return kValidation;
  }
  return kOk;
}

// ----------------------------------------------------------------- report

struct ReportFlags {
  std::string results;
  std::string radius_thresholds;
  std::string cc_thresholds;
  std::string out = ".";
};

// 0, 1, ..., ceil(max).
std::vector<double> DefaultThresholds(double max) {
  std::vector<double> t;
  for (int c = 0; c <= static_cast<int>(std::ceil(max)); ++c) t.push_back(c);
  return t;
}

int RunReport(const ReportFlags& f) {
  auto text = ReadFile(f.results);
  if (!text.ok()) return Fail(text.status());
  auto records = RecordsFromJsonl(*text);
  if (!records.ok()) return Fail(records.status());
  if (records->empty()) {
    return Fail(absl::DataLossError(
        absl::StrCat(f.results, " contains no records")));
  }
  if (auto s = EnsureDir(f.out); !s.ok()) return Fail(s);

  double max_r = 0.0;
  double max_cc = 0.0;
  for (const auto& r : *records) {
    max_r = std::max<double>(max_r, r.radius);
    max_cc = std::max(max_cc, r.log10_cc);
  }
  struct Emit {
    const std::string& flag;
    double max;
    CurveMode mode;
    const char* file;
  };
  for (const Emit& e :
       {Emit{f.radius_thresholds, max_r, CurveMode::kRadius,
             "curve_radius.csv"},
        Emit{f.cc_thresholds, max_cc, CurveMode::kLogCardinality,
             "curve_log10_cc.csv"}}) {
    std::vector<double> thresholds = DefaultThresholds(e.max);
    if (!e.flag.empty()) {
      auto parsed = ParseDoubles(e.flag);
      if (!parsed.ok()) return Fail(parsed.status());
      thresholds = *std::move(parsed);
    }
    auto curve = CertifiedAccuracyCurve(*records, thresholds, e.mode);
    if (!curve.ok()) return Fail(curve.status());
    if (auto s = WriteFile(Join(f.out, e.file), CurveCsv(*curve)); !s.ok()) {
      return Fail(s);
    }
  }
  auto summary = Summarize(*records);
  if (!summary.ok()) return Fail(summary.status());
  const std::string summary_text = summary->ToJson().dump(2) + "\n";
  if (auto s = WriteFile(Join(f.out, "summary.json"), summary_text); !s.ok()) {
    return Fail(s);
  }
  std::cout << summary_text;
  return kOk;
}

// Every long option of every subcommand can also be set through
// DELCERT_<NAME>, e.g. DELCERT_N_CERT for --n-cert.
void BindEnvironment(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands({})) {
    for (CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty()) continue;
      std::string env = "DELCERT_" + opt->get_lnames().front();
      std::transform(env.begin(), env.end(), env.begin(), [](char c) {
        return c == '-' ? '_' : static_cast<char>(std::toupper(c));
      });
      if (env == "DELCERT_HELP") continue;
      opt->envname(env);
    }
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Edit-distance certification for deletion-smoothed classifiers"};
  app.require_subcommand(1);

  CertifyFlags cert;
  CLI::App* certify = app.add_subcommand("certify", "certify every input");
  AddModelFlags(certify, cert.model);
  certify->add_option("--policy", cert.policy, "policy JSON file or object")
      ->required();
  certify->add_option("--r-max", cert.r_max, "largest radius checked (-1: |x|)")
      ->capture_default_str();
  certify->add_flag("--no-timing", cert.no_timing,
                    "write seconds = 0 for reproducible output");

  CalibrateFlags cal;
  cal.model.n_pred = 32;
  cal.model.n_cert = 256;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "optimise per-bin expected lengths");
  AddModelFlags(calibrate, cal.model);
  calibrate->add_option("--bins", cal.bins,
                        "explicit boundaries, e.g. 0,137,230,324,inf");
  calibrate->add_option("--min-count", cal.min_count, "examples per bin")
      ->capture_default_str();
  calibrate->add_option("--outlier-pct", cal.outlier_pct,
                        "percent trimmed at each end")
      ->capture_default_str();
  calibrate->add_option("--tau", cal.tau, "certified-accuracy target")
      ->capture_default_str();
  calibrate->add_option("--tol", cal.tol, "golden-section tolerance")
      ->capture_default_str();
  calibrate->add_option("--m", cal.m, "examples sampled per bin")
      ->capture_default_str();
  calibrate->add_option("--p-lb", cal.p_lb, "sets the first bin's K")
      ->capture_default_str();

  OracleFlags orc;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "exhaustively validate the bounds on small inputs");
  oracle->add_option("--lengths", orc.lengths, "input lengths")
      ->capture_default_str();
  oracle->add_option("--vocab-size", orc.vocab_size, "alphabet of inputs and neighbours")->capture_default_str();
  oracle->add_option("--r", orc.radius, "ball radius")->capture_default_str();
  oracle->add_option("--ops", orc.ops, "edit operations")->capture_default_str();
  oracle->add_option("--tables", orc.tables, "random classifiers")
      ->capture_default_str();
  oracle->add_option("--classes", orc.classes, "labels per table")->capture_default_str();
  oracle->add_option("--rates", orc.rates, "deletion rates, used in pairs")
      ->capture_default_str();
  oracle->add_option("--seed", orc.seed, "table seed")->capture_default_str();
  oracle->add_option("--out", orc.out, "JSONL report of every check");
  oracle->add_option("--corrupt-lb", orc.corrupt_lb)->group("");

  ReportFlags rep;
  CLI::App* report =
      app.add_subcommand("report", "accuracy curves and summary statistics");
  report->add_option("--results", rep.results, "certify results.jsonl")
      ->required();
  report->add_option("--radius-thresholds", rep.radius_thresholds);
  report->add_option("--cc-thresholds", rep.cc_thresholds);
  report->add_option("--out", rep.out, "output directory")
      ->capture_default_str();

  BindEnvironment(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (*certify) return RunCertify(cert);
  if (*calibrate) return RunCalibrate(cal);
  if (*oracle) return RunOracleCheck(orc);
  if (*report) return RunReport(rep);
  return kOther;
}

}  // namespace
}  // namespace delcert

int main(int argc, char** argv) { return delcert::Main(argc, argv); }
