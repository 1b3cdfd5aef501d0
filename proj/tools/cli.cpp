#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "numeracy/errors.hpp"
#include "numeracy/probe/gradcheck_suite.hpp"
#include "numeracy/runner/experiment.hpp"
#include "numeracy/runner/report.hpp"

namespace numeracy::cli {
namespace {

using runner::ExperimentConfig;

taskgen::Range parse_range(const std::string& text) {
  const auto colon = text.find(':', 1);
  if (colon == std::string::npos) throw ConfigError("range '" + text + "' must look like lo:hi");
  try {
    std::size_t a = 0, b = 0;
    const std::string lo = text.substr(0, colon), hi = text.substr(colon + 1);
    taskgen::Range r{std::stoll(lo, &a), std::stoll(hi, &b)};
    if (a != lo.size() || b != hi.size()) throw std::invalid_argument(text);
    if (r.hi < r.lo) throw ConfigError("range '" + text + "' has hi < lo");
    return r;
  } catch (const std::logic_error&) {
    throw ConfigError("range '" + text + "' must look like lo:hi");
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_seed(ExperimentConfig& c, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  c.train.seed = *seed;
  c.embedding.seed = *seed;
}

struct Options {
  std::string config;
  std::string out_dir = "numeracy-out";
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> shuffles;
  int parallelism = 0;
  bool quiet = false;

  // sweep
  std::string train_range;
  std::string eval_range = "-2000:2000";
  std::uint64_t shuffle = 1;

  // gen-data
  std::string task = "listmax";
  std::string format = "digits";
  std::string range = "0:99";

  // report
  std::string report_csv;
};

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string text = slurp(o.config);
  std::vector<ExperimentConfig> configs;
  if (runner::is_manifest(text)) {
    configs = runner::parse_manifest(text, std::filesystem::path(o.config).parent_path()).experiments;
    if (configs.empty()) err << "warning: manifest lists no experiments\n";
  } else {
    configs.push_back(runner::load_experiment(o.config));
  }
  for (auto& c : configs) {
    apply_seed(c, o.seed);
    if (!o.shuffles.empty()) c.shuffles = o.shuffles;
    if (o.parallelism > 0) c.parallelism = o.parallelism;
    c.validate();
  }
  runner::RunOptions ro;
  if (!o.quiet) ro.log = &err;
  std::vector<runner::ExperimentResult> results;
  for (const auto& c : configs) results.push_back(runner::run_experiment(c, ro));
  const auto paths = runner::write_bundle(o.out_dir, results);
  out << "wrote " << paths.report_csv.string() << "\n";
  bool ok = true;
  for (const auto& r : results) ok = ok && r.all_ok();
  if (!ok) err << "some cells failed; see " << paths.provenance_json.string() << "\n";
  return ok ? kExitOk : kExitFailure;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream&) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = runner::load_experiment(o.config);
  } else {
    c.name = "sweep";
    c.task = probe::Task::Decode;
    c.probe = probe::ProbeSpec::defaults(c.task);
    c.embedding.kind = runner::EmbeddingKind::Value;
  }
  if (!o.train_range.empty()) c.range = parse_range(o.train_range);
  if (o.config.empty() && c.range.lo < 0) c.format = numeral::NumberFormat::NegativeDigits;
  apply_seed(c, o.seed);
  c.validate();
  const taskgen::Range eval = parse_range(o.eval_range);
  auto result = runner::run_sweep(c, eval, o.shuffle);

  std::filesystem::create_directories(o.out_dir);
  const auto path = std::filesystem::path(o.out_dir) / "sweep.csv";
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write " + path.string());
  probe::write_sweep_csv(file, result.sweep);
  out << "wrote " << path.string() << " (" << result.sweep.rows.size() << " values, test "
      << probe::to_string(result.test.metric) << " " << result.test.value << ")\n";
  if (!result.sweep.skipped.empty()) out << result.sweep.skipped.size() << " values not embeddable, skipped\n";
  return kExitOk;
}

int cmd_gen_data(const Options& o, std::ostream& out, std::ostream&) {
  ExperimentConfig c;
  if (!o.config.empty()) {
    c = runner::load_experiment(o.config);
  } else {
    c.task = probe::task_from_string(o.task);
    c.format = numeral::format_from_string(o.format);
    c.range = parse_range(o.range);
    c.probe = probe::ProbeSpec::defaults(c.task);
  }
  c.validate();
  const auto data = runner::make_shuffle_data(c, o.shuffle);
  std::filesystem::create_directories(o.out_dir);
  auto write = [&](const std::string& name, const probe::ProbeDataset& ds) {
    const auto path = std::filesystem::path(o.out_dir) / name;
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write " + path.string());
    probe::write_tsv(file, ds);
    out << "wrote " << path.string() << " (" << ds.size() << " rows)\n";
  };
  write("train.tsv", data.train);
  for (std::size_t i = 0; i < data.tests.size(); ++i) {
    const auto& r = data.test_ranges[i];
    write("test_" + std::to_string(r.lo) + "_" + std::to_string(r.hi) + ".tsv", data.tests[i]);
  }
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream&) {
  bool ok = true;
  const std::uint64_t seed = o.seed.value_or(7);
  for (auto family : probe::all_model_families()) {
    const auto r = probe::gradcheck_family(family, seed);
    const bool pass = r.max_relative_error < 1e-4;
    ok = ok && pass;
    char line[160];
    std::snprintf(line, sizeof line, "%-20s max_rel_err=%.3e checked=%zu %s", std::string(to_string(family)).c_str(),
                  r.max_relative_error, r.checked, pass ? "ok" : "FAIL");
    out << line << "\n";
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
  const auto paths = runner::rebuild_aggregates(o.report_csv, o.out_dir);
  out << "wrote " << paths.aggregate_json.string() << " and " << paths.table_csv.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probe number embeddings for numeracy", "numeracy"};
  app.set_version_flag("--version", NUMERACY_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Base seed for probe and embedding initialisation");
  };

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config or a suite manifest");
  run_cmd->add_option("--config", o.config, "Experiment or manifest JSON")->required();
  add_common(run_cmd);
  run_cmd->add_option("--shuffles", o.shuffles, "Override the shuffle seed list")->delimiter(',');
  run_cmd->add_option("--parallelism", o.parallelism, "Concurrent shuffles per experiment");
  run_cmd->add_flag("--quiet", o.quiet, "No progress lines");

  auto* sweep_cmd = app.add_subcommand("sweep", "Dump decode predictions over a value range");
  sweep_cmd->add_option("--config", o.config, "Decode experiment JSON (default: value embedding)");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--train-range", o.train_range, "Training range lo:hi")->allow_extra_args(false);
  sweep_cmd->add_option("--eval-range", o.eval_range, "Sweep range lo:hi")->capture_default_str();
  sweep_cmd->add_option("--shuffle", o.shuffle, "Shuffle index")->capture_default_str();

  auto* gen_cmd = app.add_subcommand("gen-data", "Write the train and test sets of one shuffle as TSV");
  gen_cmd->add_option("--config", o.config, "Experiment JSON (overrides --task/--format/--range)");
  add_common(gen_cmd);
  gen_cmd->add_option("--task", o.task, "listmax, decode or add")->capture_default_str();
  gen_cmd->add_option("--format", o.format, "digits, words, float1 or negative")->capture_default_str();
  gen_cmd->add_option("--range", o.range, "Value range lo:hi")->capture_default_str();
  gen_cmd->add_option("--shuffle", o.shuffle, "Shuffle index")->capture_default_str();

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every model family");
  grad_cmd->add_option("--seed", o.seed, "Seed for the random models");

  auto* report_cmd = app.add_subcommand("report", "Recompute aggregates from a report CSV");
  report_cmd->add_option("--report-csv", o.report_csv, "Per-shuffle report.csv")->required();
  report_cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(o, out, err);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*gen_cmd) return cmd_gen_data(o, out, err);
    if (*grad_cmd) return cmd_gradcheck(o, out, err);
    if (*report_cmd) return cmd_report(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace numeracy::cli
