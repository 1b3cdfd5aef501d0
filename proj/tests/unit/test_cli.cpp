#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace numeracy;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "numeracy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("numeracy_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--config", "/nonexistent.json"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"gen-data", "--range", "9"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"--version"}).code, cli::kExitOk);
}

TEST(Cli, BadConfigIsUsageError) {
  const auto dir = scratch("badcfg");
  write(dir / "bad.json", R"({"task": "decode", "range": [0, 9], "no_such_key": true})");
  const auto r = invoke({"run", "--config", (dir / "bad.json").string(), "--out-dir", (dir / "o").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("no_such_key"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, RunWritesBundleAndReportRebuilds) {
  const auto dir = scratch("run");
  write(dir / "exp.json", R"({"name": "t", "task": "decode", "range": [0, 29], "shuffles": [1],
      "train": {"max_epochs": 2, "min_updates_per_epoch": 10, "max_updates_per_epoch": 10}})");
  const auto out = dir / "out";
  auto r = invoke({"run", "--config", (dir / "exp.json").string(), "--out-dir", out.string(), "--quiet",
                   "--shuffles", "1,2"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  for (const char* f : {"report.csv", "aggregate.json", "table.csv", "provenance.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  std::ifstream report(out / "report.csv");
  std::string line;
  int lines = 0;
  while (std::getline(report, line)) ++lines;
  EXPECT_EQ(lines, 3);

  r = invoke({"report", "--report-csv", (out / "report.csv").string(), "--out-dir", (dir / "re").string()});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "re" / "table.csv"));
  fs::remove_all(dir);
}

TEST(Cli, FailedCellExitsOne) {
  const auto dir = scratch("fail");
  write(dir / "v.txt", "1 0.1 0.2\n2 0.3 0.4\n");
  write(dir / "exp.json", R"({"task": "decode", "range": [0, 9], "shuffles": [1],
      "embedding": {"kind": "file", "path": "v.txt"}})");
  const auto r = invoke({"run", "--config", (dir / "exp.json").string(), "--out-dir", (dir / "o").string(), "--quiet"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_TRUE(fs::exists(dir / "o" / "report.csv"));
  fs::remove_all(dir);
}

TEST(Cli, GenDataWritesSplits) {
  const auto dir = scratch("gen");
  const auto r = invoke({"gen-data", "--task", "decode", "--range", "0:99", "--out-dir", dir.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::ifstream train(dir / "train.tsv"), test(dir / "test_0_99.tsv");
  ASSERT_TRUE(train && test);
  int n_train = 0, n_test = 0;
  std::string line;
  while (std::getline(train, line)) ++n_train;
  while (std::getline(test, line)) ++n_test;
  EXPECT_EQ(n_train, 80);
  EXPECT_EQ(n_test, 20);
  fs::remove_all(dir);
}

TEST(Cli, Gradcheck) {
  const auto r = invoke({"gradcheck"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("lstm"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}
