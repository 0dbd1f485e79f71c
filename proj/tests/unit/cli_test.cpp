// Copyright 2026 The otgof Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "otgof/csv.hpp"
#include "otgof/distributions.hpp"

namespace otgof::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "otgof");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("otgof_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_data(const std::string& name, const Points& x) {
    const std::string path = (dir_ / name).string();
    std::ofstream file(path);
    write_points_csv(file, x);
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GridDump) {
  const auto r = run({"grid-dump", "--grid", "spherical", "--p", "2", "--N", "500"});
  ASSERT_EQ(r.code, kExitRetain) << r.err;
  std::istringstream in(r.out);
  const Points g = read_points_csv(in);
  EXPECT_EQ(g.rows(), 500);
  EXPECT_LT(g.rowwise().norm().maxCoeff(), 1.0);
}

TEST_F(CliTest, SimpleTestIsReproducible) {
  const auto data = write_data("x.csv", sample_mvnormal({Vector::Zero(2), Matrix::Identity(2, 2)},
                                                        40, 3));
  const std::vector<std::string> args = {"--seed", "5", "test-simple", "--data", data,
                                         "--calibrate-on-the-fly", "--reps", "300", "--report",
                                         path("r.txt")};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_NE(a.code, kExitError) << a.err;
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  std::ifstream report(path("r.txt"));
  std::string line;
  std::getline(report, line);
  EXPECT_EQ(line + "\n", a.out);
  EXPECT_NE(a.out.find("null=normal(mean=0;cov=I)"), std::string::npos);
  EXPECT_NE(a.out.find("m=200"), std::string::npos);
  EXPECT_NE(a.err.find("elapsed"), std::string::npos);
}

TEST_F(CliTest, UniformDataRejected) {
  const auto data = write_data("u.csv", sample_uniform_box(-1.0, 1.0, 2, 50, std::uint64_t{4}));
  const auto r = run({"test-simple", "--data", data, "--calibrate-on-the-fly", "--reps", "300"});
  EXPECT_EQ(r.code, kExitReject) << r.err;
  EXPECT_NE(r.out.find("decision=reject"), std::string::npos);
}

TEST_F(CliTest, MalformedCsvReportsLine) {
  const std::string bad = path("bad.csv");
  std::ofstream(bad) << "0.1,0.2\n0.3,oops\n";
  const auto r = run({"test-simple", "--data", bad, "--calibrate-on-the-fly"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingTableEntry) {
  const auto data = write_data("x.csv", Points::Random(20, 2));
  const auto r = run({"test-simple", "--data", data, "--table", path("none.csv")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("--calibrate-on-the-fly"), std::string::npos) << r.err;
}

TEST_F(CliTest, CalibrateThenLookupMatchesOnTheFly) {
  const auto data = write_data("x.csv", sample_mvnormal({Vector::Zero(2), Matrix::Identity(2, 2)},
                                                        30, 8));
  const std::string table = path("table.csv");
  const auto cal = run({"--seed", "9", "calibrate", "--n", "30", "--m", "200", "--reps", "400",
                        "--table", table});
  ASSERT_EQ(cal.code, kExitRetain) << cal.err;
  const auto lookup = run({"--seed", "9", "test-simple", "--data", data, "--table", table});
  const auto fly = run({"--seed", "9", "test-simple", "--data", data, "--calibrate-on-the-fly",
                        "--reps", "400"});
  ASSERT_NE(lookup.code, kExitError) << lookup.err;
  EXPECT_EQ(lookup.code, fly.code);
  auto field = [](const std::string& rec, const std::string& key) {
    const auto at = rec.find(key + "=");
    return rec.substr(at, rec.find(' ', at) - at);
  };
  EXPECT_EQ(field(lookup.out, "critical_value"), field(fly.out, "critical_value"));
  EXPECT_EQ(field(lookup.out, "statistic"), field(fly.out, "statistic"));

  const auto clash = run({"--seed", "10", "calibrate", "--n", "30", "--m", "200", "--reps",
                          "400", "--table", table});
  EXPECT_EQ(clash.code, kExitError);
  EXPECT_NE(clash.err.find("--force"), std::string::npos);
  const auto forced = run({"--seed", "10", "calibrate", "--n", "30", "--m", "200", "--reps",
                           "400", "--table", table, "--force"});
  EXPECT_EQ(forced.code, kExitRetain) << forced.err;
}

TEST_F(CliTest, TableDirectoryFromEnvironment) {
  ::setenv("OTGOF_TABLE_DIR", dir_.c_str(), 1);
  const auto r = run({"calibrate", "--n", "20", "--m", "100", "--reps", "200"});
  ::unsetenv("OTGOF_TABLE_DIR");
  EXPECT_EQ(r.code, kExitRetain) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "critical_values.csv"));
}

TEST_F(CliTest, CompositeTestRuns) {
  const auto data = write_data("x.csv", sample_mvnormal({Vector::Ones(2), Matrix::Identity(2, 2)},
                                                        30, 2));
  const auto r = run({"test-composite", "--data", data, "--reference", "grid", "--m", "100",
                      "--B", "100"});
  ASSERT_NE(r.code, kExitError) << r.err;
  EXPECT_NE(r.out.find("reference=grid"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("bootstrap_reps=100"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"reproduce", "table9"}).code, kExitError);
  EXPECT_EQ(run({"reproduce", "crit", "--budget", "huge"}).code, kExitError);
  EXPECT_EQ(run({}).code, kExitError);
  EXPECT_EQ(run({"test-simple"}).code, kExitError);
  EXPECT_EQ(run({"--help"}).code, kExitRetain);
  EXPECT_EQ(run({"grid-dump", "--N", "10", "--grid", "hex"}).code, kExitError);
}

}  // namespace
}  // namespace otgof::cli
