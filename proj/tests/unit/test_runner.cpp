#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "numeracy/errors.hpp"
#include "numeracy/runner/experiment.hpp"
#include "numeracy/runner/report.hpp"

using namespace numeracy;
using namespace numeracy::runner;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("numeracy_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small and fast: a few hundred updates per cell.
const char* kTinyDecode = R"({
  "name": "tiny", "task": "decode", "range": [0, 49],
  "embedding": {"kind": "value"},
  "shuffles": [1, 2],
  "train": {"max_epochs": 3, "min_updates_per_epoch": 20, "max_updates_per_epoch": 20}
})";

}  // namespace

TEST(Config, DefaultsFromBareConfig) {
  const auto c = parse_experiment(R"({"task": "listmax"})");
  EXPECT_EQ(c.range, (taskgen::Range{0, 99}));
  EXPECT_EQ(c.probe.head, probe::Head::LstmClassifier);
  EXPECT_EQ(c.probe.lstm_hidden, 100);
  EXPECT_EQ(c.train.batch_size, 32);
  EXPECT_EQ(c.train.patience, 5);
  EXPECT_EQ(c.train.max_epochs, 100);
  EXPECT_EQ(c.train.min_updates_per_epoch, 100);
  EXPECT_EQ(c.train.max_updates_per_epoch, 0);
  EXPECT_DOUBLE_EQ(c.train.adam.lr, 1e-3);
  EXPECT_EQ(c.data.train_lists, 100000u);
  EXPECT_EQ(c.data.test_lists, 10000u);
  EXPECT_EQ(c.shuffles.size(), 5u);
  const auto d = parse_experiment(R"({"task": "decode"})");
  EXPECT_EQ(d.probe.head, probe::Head::Mlp3);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_experiment("{"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"task": "sort"})"), Error);
  EXPECT_THROW(parse_experiment(R"({"task": "decode", "colour": 1})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"format": "words", "range": [0, 999]})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"range": [10, 0]})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"shuffles": []})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"embedding": {"kind": "file"}})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"task": "decode", "format": "float1"})"), ConfigError);
  EXPECT_THROW(parse_experiment(R"({"mode": "extrapolate", "train_range": [0, 150], "test_ranges": [[100, 160]]})"),
               ConfigError);
  EXPECT_THROW(parse_experiment(R"({"train": {"batch_size": 0}})"), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const auto c = parse_experiment(
      R"({"name": "x", "task": "add", "format": "negative", "range": [-50, 50],
          "embedding": {"kind": "char_cnn", "trainable": false}, "shuffles": [3]})");
  const auto again = parse_experiment(to_json(c));
  EXPECT_EQ(to_json(c), to_json(again));
  EXPECT_EQ(again.embedding.display_name(), "untrained-cnn");
}

TEST(Config, ManifestDefaultsMerge) {
  const auto m = parse_manifest(R"({
    "name": "suite",
    // comments are allowed
    "defaults": {"task": "decode", "shuffles": [1]},
    "experiments": [{"name": "a"}, {"name": "b", "shuffles": [2, 3]}]
  })");
  ASSERT_EQ(m.experiments.size(), 2u);
  EXPECT_EQ(m.experiments[0].task, probe::Task::Decode);
  EXPECT_EQ(m.experiments[0].shuffles, std::vector<std::uint64_t>{1});
  EXPECT_EQ(m.experiments[1].shuffles, (std::vector<std::uint64_t>{2, 3}));
  EXPECT_TRUE(is_manifest(R"({"experiments": []})"));
  EXPECT_FALSE(is_manifest(R"({"task": "decode"})"));
  try {
    parse_manifest(R"({"experiments": [{}, {"range": [5, 1]}]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos) << e.what();
  }
}

TEST(Shuffles, SameSplitAcrossEmbeddings) {
  auto a = parse_experiment(R"({"task": "listmax", "embedding": {"kind": "random"},
                                "data": {"train_lists": 100, "test_lists": 50}})");
  auto b = a;
  b.embedding.kind = EmbeddingKind::CharCnn;
  b.task = probe::Task::Decode;
  b.probe = probe::ProbeSpec::defaults(b.task);
  for (std::uint64_t s : {1, 2, 3}) {
    const auto da = make_shuffle_data(a, s), db = make_shuffle_data(b, s);
    EXPECT_EQ(da.split_seed, db.split_seed);
    EXPECT_EQ(da.train_pool, db.train_pool);
  }
  EXPECT_NE(make_shuffle_data(a, 1).train_pool, make_shuffle_data(a, 2).train_pool);
}

TEST(Shuffles, ExtrapolationPurity) {
  const auto c = parse_experiment(R"({"task": "listmax", "mode": "extrapolate",
      "train_range": [0, 150], "test_ranges": [[151, 160], [151, 180], [151, 200]],
      "data": {"train_lists": 2000, "test_lists": 500}})");
  const auto d = make_shuffle_data(c, 1);
  for (const auto& t : d.train.vocab) {
    ASSERT_GE(t.units(), 0);
    ASSERT_LE(t.units(), 150);
  }
  ASSERT_EQ(d.tests.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (const auto& t : d.tests[i].vocab) {
      ASSERT_GE(t.units(), d.test_ranges[i].lo);
      ASSERT_LE(t.units(), d.test_ranges[i].hi);
    }
  // The whole training range is available for training in extrapolation.
  EXPECT_EQ(d.train_pool.size(), 151u);
}

TEST(Run, FailureIsolation) {
  const auto dir = scratch("isolation");
  {
    std::ofstream f(dir / "digits.txt");
    for (int v = 0; v < 50; ++v) f << v << " " << v * 0.01 << " " << (v % 7) * 0.1 << "\n";
  }
  const auto suite = parse_manifest(R"({
    "defaults": {"task": "decode", "range": [0, 49], "shuffles": [1, 2],
                 "train": {"max_epochs": 2, "min_updates_per_epoch": 10, "max_updates_per_epoch": 10}},
    "experiments": [
      {"name": "words", "format": "words", "embedding": {"kind": "file", "path": "digits.txt"}},
      {"name": "digits", "embedding": {"kind": "file", "path": "digits.txt"}}
    ]})",
                                    dir);
  const auto results = run_suite(suite);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_FALSE(results[0].all_ok());
  for (const auto& c : results[0].cells) {
    EXPECT_FALSE(c.ok);
    EXPECT_TRUE(std::isnan(c.value));
    EXPECT_NE(c.error.find("forty-five"), std::string::npos) << c.error;
  }
  EXPECT_TRUE(results[1].all_ok());
  for (const auto& c : results[1].cells) EXPECT_TRUE(std::isfinite(c.value));

  const auto paths = write_bundle(dir / "out", results);
  std::ifstream in(paths.report_csv);
  const auto rows = read_report_csv(in);
  ASSERT_EQ(rows.size(), 4u);
  const auto agg = aggregate(rows);
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].failed, 2u);
  EXPECT_EQ(agg[0].n, 0u);
  EXPECT_EQ(agg[1].failed, 0u);
  EXPECT_NE(slurp(paths.provenance_json).find("\"failures\""), std::string::npos);
  fs::remove_all(dir);
}

TEST(Report, AggregatesMatchRecomputation) {
  std::vector<ReportRow> rows;
  const double vals[] = {0.91, 0.97, 0.955, 1.0 / 3.0};
  for (int i = 0; i < 4; ++i)
    rows.push_back({"listmax", "digits", 0, 99, "interpolate", "value-embedding", "lstm", std::uint64_t(i + 1),
                    "accuracy", vals[i]});
  rows.push_back({"decode", "digits", 0, 99, "interpolate", "value-embedding", "mlp3", 1, "rmse", 2.5});

  std::stringstream csv;
  write_report_csv(csv, rows);
  const auto back = read_report_csv(csv);
  ASSERT_EQ(back, rows);

  const auto agg = aggregate(back);
  ASSERT_EQ(agg.size(), 2u);
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= 4.0;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(agg[0].mean, mean, 1e-12);
  EXPECT_NEAR(agg[0].std, std::sqrt(ss / 3.0), 1e-12);
  EXPECT_EQ(agg[0].n, 4u);
  EXPECT_TRUE(std::isnan(agg[1].std));

  std::ostringstream table;
  write_table_csv(table, agg);
  EXPECT_NE(table.str().find("value-embedding,lstm,"), std::string::npos);
  std::ostringstream json;
  write_aggregate_json(json, agg);
  EXPECT_NE(json.str().find("\"std\": null"), std::string::npos);
}

TEST(Report, RejectsMalformedCsv) {
  std::istringstream bad_header("a,b\n");
  EXPECT_THROW(read_report_csv(bad_header), ParseError);
  std::istringstream bad_row(std::string(kReportHeader) + "\nlistmax,digits,0,99\n");
  EXPECT_THROW(read_report_csv(bad_row), ParseError);
  std::istringstream bad_value(std::string(kReportHeader) + "\nlistmax,digits,0,99,interpolate,x,lstm,1,accuracy,abc\n");
  EXPECT_THROW(read_report_csv(bad_value), ParseError);
  std::vector<ReportRow> comma{{"listmax", "digits", 0, 99, "interpolate", "a,b", "lstm", 1, "accuracy", 0.5}};
  std::ostringstream out;
  EXPECT_THROW(write_report_csv(out, comma), ConfigError);
}

TEST(Run, DeterministicReports) {
  const auto c = parse_experiment(kTinyDecode);
  const auto a = run_experiment(c), b = run_experiment(c);
  const auto da = scratch("det_a"), db = scratch("det_b");
  const std::vector<ExperimentResult> ra{a}, rb{b};
  write_bundle(da, ra);
  write_bundle(db, rb);
  for (const char* f : {"report.csv", "aggregate.json", "table.csv"})
    EXPECT_EQ(slurp(da / f), slurp(db / f)) << f;

  // Parallel shuffles give the same numbers.
  auto par = c;
  par.parallelism = 2;
  const auto p = run_experiment(par);
  ASSERT_EQ(p.cells.size(), a.cells.size());
  for (std::size_t i = 0; i < p.cells.size(); ++i) EXPECT_EQ(p.cells[i].value, a.cells[i].value);

  const auto rebuilt = rebuild_aggregates(da / "report.csv", db / "again");
  EXPECT_EQ(slurp(rebuilt.aggregate_json), slurp(da / "aggregate.json"));
  EXPECT_EQ(slurp(rebuilt.table_csv), slurp(da / "table.csv"));
  fs::remove_all(da);
  fs::remove_all(db);
}

TEST(Run, SweepCoversEvaluationRange) {
  auto c = parse_experiment(kTinyDecode);
  const auto out = run_sweep(c, {0, 70}, 1);
  EXPECT_EQ(out.sweep.rows.size(), 71u);
  EXPECT_TRUE(out.sweep.skipped.empty());
  EXPECT_EQ(out.test.metric, probe::Metric::RMSE);
  auto lm = parse_experiment(R"({"task": "listmax"})");
  EXPECT_THROW(run_sweep(lm, {0, 10}, 1), ConfigError);
}

TEST(Manifests, ShippedManifestsParse) {
  std::size_t checked = 0;
  for (const auto& entry : fs::recursive_directory_iterator(NUMERACY_MANIFEST_ROOT)) {
    if (entry.path().extension() != ".json") continue;
    const std::string text = slurp(entry.path());
    if (is_manifest(text)) {
      const auto m = load_manifest(entry.path());
      EXPECT_FALSE(m.experiments.empty()) << entry.path();
      for (const auto& e : m.experiments) EXPECT_NO_THROW(e.validate()) << entry.path() << " " << e.name;
    } else {
      EXPECT_NO_THROW(load_experiment(entry.path())) << entry.path();
    }
    ++checked;
  }
  EXPECT_GT(checked, 10u);
}
