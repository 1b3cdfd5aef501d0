// Acceptance suite. Each criterion prints one line:
//   criterion N: PASS|FAIL|SKIP  <what was measured>
// Usage: numeracy_acceptance [--criterion N]...   (no flag runs all)
// Exit code: 0 all passed, 1 any failed, 77 when every selected criterion was skipped.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "numeracy/errors.hpp"
#include "numeracy/numeral.hpp"
#include "numeracy/probe/gradcheck_suite.hpp"
#include "numeracy/random.hpp"
#include "numeracy/runner/experiment.hpp"
#include "numeracy/runner/report.hpp"
#include "numeracy/taskgen.hpp"

using namespace numeracy;
using namespace numeracy::runner;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path manifest(const std::string& name) { return fs::path(NUMERACY_MANIFEST_DIR) / name; }

std::vector<ExperimentResult> run_manifest(const std::string& name) {
  RunOptions opts;
  opts.log = &std::cerr;
  return run_suite(load_manifest(manifest(name)), opts);
}

const ExperimentResult& find(const std::vector<ExperimentResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.config.name == name) return r;
  throw std::runtime_error("manifest has no experiment '" + name + "'");
}

/// Mean over shuffles of the cells evaluated on `range` (or the only range).
/// Failed cells make the mean NaN.
double mean_of(const ExperimentResult& r, std::optional<taskgen::Range> range = std::nullopt) {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : r.cells) {
    if (range && !(c.range == *range)) continue;
    if (!c.ok) return std::nan("");
    sum += c.value;
    ++n;
  }
  return n ? sum / n : std::nan("");
}

std::map<std::uint64_t, double> by_shuffle(const ExperimentResult& r) {
  std::map<std::uint64_t, double> out;
  for (const auto& c : r.cells) out[c.shuffle] = c.ok ? c.value : std::nan("");
  return out;
}

/// Accumulates sub-checks; the criterion passes only if all of them do.
struct Checks {
  bool ok = true;
  std::vector<std::string> parts;

  void check(bool pass, const std::string& what) {
    ok = ok && pass;
    parts.push_back(what + (pass ? "" : " [x]"));
  }
  void within(const std::string& what, double v, double lo, double hi, const char* f = "%.3f") {
    check(v >= lo && v <= hi, what + "=" + fmt(f, v) + " in [" + fmt(f, lo) + "," + fmt(f, hi) + "]");
  }
  void at_least(const std::string& what, double v, double lo, const char* f = "%.3f") {
    check(v >= lo, what + "=" + fmt(f, v) + " >= " + fmt(f, lo));
  }
  void at_most(const std::string& what, double v, double hi, const char* f = "%.3f") {
    check(v <= hi, what + "=" + fmt(f, v) + " <= " + fmt(f, hi));
  }
  void runtime(const Clock& clock, double limit) {
    check(clock.seconds() < limit, "runtime " + fmt("%.0f", clock.seconds()) + "s < " + fmt("%.0f", limit) + "s");
  }
  Outcome outcome() const {
    std::string d;
    for (const auto& p : parts) d += (d.empty() ? "" : "; ") + p;
    return {ok ? Verdict::Pass : Verdict::Fail, d};
  }
};

Outcome random_floor() {
  Clock clock;
  const auto rs = run_manifest("random_floor.json");
  Checks c;
  c.within("list max [0,99] accuracy", mean_of(find(rs, "random-listmax-0-99")), 0.10, 0.35);
  c.within("decode [0,999] rmse", mean_of(find(rs, "random-decode-0-999")), 230, 360, "%.1f");
  c.runtime(clock, 5 * 60);
  return c.outcome();
}

Outcome value_ceiling() {
  Clock clock;
  const auto rs = run_manifest("value_ceiling.json");
  Checks c;
  c.at_least("list max accuracy", mean_of(find(rs, "value-listmax-0-99")), 0.95);
  c.at_most("decode rmse", mean_of(find(rs, "value-decode-0-99")), 3.0, "%.2f");
  c.at_most("add rmse", mean_of(find(rs, "value-add-0-99")), 1.5, "%.2f");
  c.runtime(clock, 10 * 60);
  return c.outcome();
}

Outcome untrained_cnn() {
  Clock clock;
  const auto rs = run_manifest("untrained_cnn.json");
  Checks c;
  c.at_least("list max accuracy", mean_of(find(rs, "untrained-cnn-listmax-0-99")), 0.90);
  c.runtime(clock, 10 * 60);
  return c.outcome();
}

Outcome learned_cnn() {
  Clock clock;
  const auto rs = run_manifest("learned_cnn.json");
  Checks c;
  c.at_least("list max [0,999] accuracy", mean_of(find(rs, "char-cnn-listmax-0-999")), 0.85);
  const auto& learned = find(rs, "char-cnn-decode-0-999");
  const auto& untrained = find(rs, "untrained-cnn-decode-0-999");
  c.at_most("decode [0,999] rmse", mean_of(learned), 15.0, "%.2f");
  const auto a = by_shuffle(learned), b = by_shuffle(untrained);
  bool beats = a.size() == b.size();
  std::string pairs;
  for (const auto& [s, v] : a) {
    const auto it = b.find(s);
    if (it == b.end() || !(v < it->second)) beats = false;
    pairs += (pairs.empty() ? "" : " ") + fmt("%.2f", v) + "<" + (it == b.end() ? "?" : fmt("%.2f", it->second));
  }
  c.check(beats, "learned beats untrained decode per shuffle (" + pairs + ")");
  c.runtime(clock, 30 * 60);
  return c.outcome();
}

Outcome extrapolation() {
  Clock clock;
  const auto rs = run_manifest("extrapolation.json");
  Checks c;
  const taskgen::Range r10{151, 160}, r30{151, 180}, r50{151, 200};
  c.at_most("random [151,160] accuracy", mean_of(find(rs, "random-extrapolate"), r10), 0.30);
  const auto& lstm = find(rs, "char-lstm-extrapolate");
  const double a = mean_of(lstm, r10), b = mean_of(lstm, r30), d = mean_of(lstm, r50);
  c.at_least("char-lstm [151,160] accuracy", a, 0.60);
  c.check(b <= a + 0.05 && d <= b + 0.05,
          "char-lstm degrades " + fmt("%.3f", a) + " / " + fmt("%.3f", b) + " / " + fmt("%.3f", d) + " (slack 0.05)");
  c.runtime(clock, 30 * 60);
  return c.outcome();
}

Outcome sweep_shape() {
  const auto config = load_experiment(manifest("sweep.json"));
  const auto out = run_sweep(config, {-2000, 2000}, 1);
  const auto dir = fs::temp_directory_path() / "numeracy_acceptance_sweep";
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "sweep.csv");
    probe::write_sweep_csv(csv, out.sweep);
  }
  std::ifstream back(dir / "sweep.csv");
  std::string line;
  std::size_t rows = 0;
  std::getline(back, line);
  while (std::getline(back, line)) ++rows;

  double in_se = 0.0, out_ae = 0.0;
  std::size_t n_in = 0, n_out = 0;
  for (const auto& r : out.sweep.rows) {
    const double err = r.prediction - r.value;
    if (r.in_train_range) {
      in_se += err * err;
      ++n_in;
    } else if (std::abs(r.value) >= 1500 && std::abs(r.value) <= 2000) {
      out_ae += std::abs(err);
      ++n_out;
    }
  }
  const double in_rmse = std::sqrt(in_se / static_cast<double>(n_in));
  const double out_mae = out_ae / static_cast<double>(n_out);
  const double range = static_cast<double>(config.range.size() - 1);
  Checks c;
  c.check(rows == 4001 && out.sweep.skipped.empty(), "csv rows=" + std::to_string(rows));
  c.at_most("in-range rmse", in_rmse, 0.05 * range, "%.2f");
  c.at_least("|v| in [1500,2000] mae", out_mae, 3.0 * in_rmse, "%.1f");
  fs::remove_all(dir);
  return c.outcome();
}

Outcome property_suite() {
  Checks c;
  double worst = 0.0;
  for (auto family : probe::all_model_families())
    worst = std::max(worst, probe::gradcheck_family(family, 7).max_relative_error);
  c.check(worst < 1e-4, "gradcheck max rel err " + fmt("%.2e", worst) + " < 1e-4");

  bool round_trip = true;
  for (std::int64_t v = 0; v <= 99; ++v)
    round_trip = round_trip && numeral::parse(numeral::render(v, numeral::NumberFormat::Words),
                                              numeral::NumberFormat::Words) == v;
  for (std::int64_t v = -10000; v <= 10000; ++v)
    round_trip = round_trip && numeral::parse(numeral::render(v, numeral::NumberFormat::NegativeDigits),
                                              numeral::NumberFormat::NegativeDigits) == v;
  c.check(round_trip, "numeral round trip");

  Rng rng(99);
  bool splits = true;
  for (int trial = 0; trial < 1000 && splits; ++trial) {
    const std::int64_t lo = static_cast<std::int64_t>(rng.below(20000)) - 10000;
    const std::int64_t size = 1 + static_cast<std::int64_t>(rng.below(2000));
    const taskgen::Range range{lo, lo + size - 1};
    const auto s = taskgen::make_split(range, rng.next());
    std::set<std::int64_t> train(s.train_pool.begin(), s.train_pool.end());
    std::size_t covered = train.size();
    for (auto v : s.test_pool) {
      splits = splits && !train.count(v) && range.contains(v);
      ++covered;
    }
    for (auto v : s.train_pool) splits = splits && range.contains(v);
    splits = splits && covered == static_cast<std::size_t>(size);
    if (s.test_pool.size() >= taskgen::kListLength) {
      taskgen::ListMaxOptions o;
      o.count = 10;
      o.range_size = size;
      o.format = numeral::NumberFormat::NegativeDigits;
      o.seed = rng.next();
      std::set<std::int64_t> test(s.test_pool.begin(), s.test_pool.end());
      for (const auto& inst : taskgen::gen_listmax(s.test_pool, o))
        for (const auto& t : inst.tokens) splits = splits && test.count(t.units());
    }
  }
  c.check(splits, "1000 random splits disjoint, covering and leak-free");

  taskgen::ListMaxOptions o;
  o.count = 10000;
  o.range_size = 1000;
  o.seed = 5;
  std::vector<std::int64_t> pool;
  for (std::int64_t v = 0; v < 1000; ++v) pool.push_back(v);
  bool labels = true;
  for (const auto& inst : taskgen::gen_listmax(pool, o)) {
    int best = 0;
    for (int i = 1; i < 5; ++i)
      if (inst.tokens[i].units() > inst.tokens[best].units()) best = i;
    labels = labels && best == inst.label;
  }
  c.check(labels, "10000 list-max labels match brute-force argmax");

  const auto suite = load_manifest(manifest("determinism.json"));
  std::string first;
  bool identical = true;
  for (int run = 0; run < 2; ++run) {
    const auto results = run_suite(suite);
    std::ostringstream report, agg, table;
    const auto rows = to_rows(results);
    write_report_csv(report, rows);
    const auto a = aggregate(rows);
    write_aggregate_json(agg, a);
    write_table_csv(table, a);
    const std::string text = report.str() + agg.str() + table.str();
    if (run == 0) first = text;
    else identical = text == first;
  }
  c.check(identical, "two identical runs give byte-identical reports");
  return c.outcome();
}

Outcome word_vectors() {
  const char* path = std::getenv("NUMERACY_GLOVE_PATH");
  if (!path || !*path || !fs::exists(path))
    return {Verdict::Skip, "set NUMERACY_GLOVE_PATH to a 300-d vector file covering [0,9999]"};
  Clock clock;
  auto suite = load_manifest(manifest("word_vectors.json"));
  for (auto& e : suite.experiments) e.embedding.path = path;
  RunOptions opts;
  opts.log = &std::cerr;
  const auto rs = run_suite(suite, opts);
  Checks c;
  c.within("[0,99] accuracy", mean_of(find(rs, "glove-listmax-0-99")), 0.90 - 0.08, 0.90 + 0.08);
  c.within("[0,999] accuracy", mean_of(find(rs, "glove-listmax-0-999")), 0.78 - 0.08, 0.78 + 0.08);
  c.within("[0,9999] accuracy", mean_of(find(rs, "glove-listmax-0-9999")), 0.72 - 0.08, 0.72 + 0.08);
  c.parts.push_back("runtime " + fmt("%.0f", clock.seconds()) + "s");
  return c.outcome();
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "random-vector floor", random_floor},
      {2, "value-embedding near-ceiling", value_ceiling},
      {3, "untrained Char-CNN prior", untrained_cnn},
      {4, "learned Char-CNN dominance", learned_cnn},
      {5, "extrapolation failure pattern", extrapolation},
      {6, "decode sweep shape", sweep_shape},
      {7, "property suite", property_suite},
      {8, "word-vector numeracy", word_vectors},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: numeracy_acceptance [--criterion N]...\n";
      return 2;
    }
  }

  int passed = 0, failed = 0, skipped = 0;
  for (const auto& cr : all) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("error: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::cout << "criterion " << cr.id << ": " << tag << "  " << cr.title << ": " << o.detail << std::endl;
    (o.verdict == Verdict::Pass ? passed : o.verdict == Verdict::Fail ? failed : skipped)++;
  }
  if (failed) return 1;
  if (passed == 0 && skipped > 0) return 77;
  return 0;
}
