// Copyright 2026 The qkdlab Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkdlab_cli.hpp"

namespace qkdlab::cli {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TEST(Cli, RunAncillaJson) {
  const auto r = invoke({"run", "--d", "3", "--rounds", "5", "--key", "1,0,2,1,2", "--attack", "ancilla", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["qber"], "0/1");
  EXPECT_EQ(j["eve_observations"], Json::parse("[0, 1]"));
  EXPECT_EQ(j["bob_outcomes"], Json::parse("[1, 0, 2, 1, 2]"));
}

TEST(Cli, RunTextSummary) {
  const auto r = invoke({"run", "--d", "3", "--key", "1,0,2,1,2", "--attack", "ancilla", "--announce", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("eve observations:   [0,1]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("eve known fraction: 3/5"), std::string::npos) << r.out;
}

TEST(Cli, DetectionExitCode) {
  // Intercepting round 1 corrupts round 2 with probability 4/5; announcing round 2 exposes it.
  int detected = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto r = invoke({"run", "--d", "5", "--rounds", "2", "--attack", "intercept", "--announce", "even", "--seed",
                           std::to_string(seed)});
    ASSERT_TRUE(r.code == kExitOk || r.code == kExitDetected) << r.err;
    detected += r.code == kExitDetected ? 1 : 0;
  }
  EXPECT_GT(detected, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"run", "--d", "4", "--mode", "exact"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "--d", "3", "--key", "1,3"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "--d", "3", "--attack", "mitm"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "--d", "3", "--key", "1,2", "--rounds", "3"}).code, kExitUsage);
  EXPECT_EQ(invoke({"run", "--d", "3", "--rounds", "2", "--announce", "5"}).code, kExitUsage);
  EXPECT_EQ(invoke({"experiment", "--key", "1,2"}).code, kExitUsage);
  EXPECT_EQ(invoke({"verify-trace", "--d", "4"}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({}).code, kExitUsage);
}

TEST(Cli, CompositeDimensionInFloatMode) {
  const auto r = invoke({"run", "--d", "4", "--mode", "float", "--attack", "ancilla", "--rounds", "5", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["qber"], "0/1");
}

TEST(Cli, VerifyTracePasses) {
  for (const char* d : {"2", "3", "5"}) {
    const auto r = invoke({"verify-trace", "--d", d, "--key-seed", "9"});
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    EXPECT_NE(r.out.find("32/32 stages match"), std::string::npos) << r.out;
  }
  const auto f = invoke({"verify-trace", "--d", "3", "--key", "1,0,2,1,2", "--mode", "float"});
  EXPECT_EQ(f.code, kExitOk) << f.out;
}

TEST(Cli, ExperimentJsonAndCsv) {
  const auto j = invoke({"experiment", "--d", "3", "--attack", "intercept", "--trials", "300", "--seed", "4"});
  ASSERT_EQ(j.code, kExitOk) << j.err;
  const auto report = Json::parse(j.out);
  EXPECT_EQ(report["rows"][0]["error_by_round"][1]["exact"], "2/3");
  EXPECT_EQ(report["rows"][0]["next_round"], 2);

  const auto c = invoke({"experiment", "--d", "2,3", "--attack", "none,intercept", "--trials", "20", "--format", "csv"});
  ASSERT_EQ(c.code, kExitOk) << c.err;
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 5);
  EXPECT_EQ(c.out.rfind(kReportCsvHeader, 0), 0u);
}

TEST(Cli, ExperimentWritesOutFile) {
  const auto path = std::filesystem::temp_directory_path() / "qkdlab_cli_test_report.csv";
  const auto r = invoke({"experiment", "--d", "2", "--attack", "intercept", "--trials", "50", "--format", "csv", "--out",
                         path.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("exact=1/2"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(path).rfind(kReportCsvHeader, 0), 0u);
  std::filesystem::remove(path);
}

TEST(Cli, TraceFilesAreByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto a = dir / "qkdlab_cli_trace_a.json", b = dir / "qkdlab_cli_trace_b.json";
  for (const auto& p : {a, b}) {
    const auto r = invoke({"run", "--d", "3", "--rounds", "4", "--attack", "intercept", "--intercept-rounds", "1,3",
                           "--seed", "17", "--trace", p.string()});
    ASSERT_TRUE(r.code == kExitOk || r.code == kExitDetected) << r.err;
  }
  const auto ta = slurp(a);
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b));
  const auto j = Json::parse(ta);
  EXPECT_EQ(j["schema"], kTranscriptSchema);
  EXPECT_EQ(j["rounds"].size(), 4u);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, SeedFromEnvironment) {
  ::setenv("QKDLAB_SEED", "23", 1);
  const auto env = invoke({"run", "--d", "3", "--rounds", "3", "--attack", "intercept", "--format", "json"});
  ::unsetenv("QKDLAB_SEED");
  const auto flag = invoke({"run", "--d", "3", "--rounds", "3", "--attack", "intercept", "--format", "json", "--seed", "23"});
  EXPECT_EQ(env.out, flag.out);
  EXPECT_EQ(Json::parse(flag.out)["seed"], 23);
}

}  // namespace
}  // namespace qkdlab::cli
