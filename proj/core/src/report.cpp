#include "numeracy/runner/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "numeracy/errors.hpp"

namespace numeracy::runner {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos)
    throw ConfigError("report field contains a CSV delimiter: '" + s + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_int(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ParseError("report line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
}

double parse_value(const std::string& s, std::size_t line_no) {
  if (s == "nan") return std::nan("");
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("report line " + std::to_string(line_no) + ": bad value '" + s + "'");
  }
}

std::string pm(double mean, double sd, const std::string& metric) {
  const char* f = metric == "accuracy" ? "%.3f" : "%.2f";
  char a[64], b[64];
  std::snprintf(a, sizeof a, f, mean);
  if (std::isnan(sd)) return a;
  std::snprintf(b, sizeof b, f, sd);
  return std::string(a) + " ± " + b;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

ReportRow to_row(const CellResult& c) {
  ReportRow r;
  r.task = std::string(probe::to_string(c.task));
  r.format = std::string(numeral::to_string(c.format));
  r.range_lo = c.range.lo;
  r.range_hi = c.range.hi;
  r.mode = std::string(to_string(c.mode));
  r.embedding = c.embedding;
  r.probe = c.probe;
  r.shuffle_index = c.shuffle;
  r.metric = std::string(probe::to_string(c.metric));
  r.value = c.ok ? c.value : std::nan("");
  return r;
}

std::vector<ReportRow> to_rows(std::span<const ExperimentResult> results) {
  std::vector<ReportRow> rows;
  for (const auto& e : results)
    for (const auto& c : e.cells) rows.push_back(to_row(c));
  return rows;
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    for (const auto* s : {&r.task, &r.format, &r.mode, &r.embedding, &r.probe, &r.metric}) check_field(*s);
    out << r.task << ',' << r.format << ',' << r.range_lo << ',' << r.range_hi << ',' << r.mode << ','
        << r.embedding << ',' << r.probe << ',' << r.shuffle_index << ',' << r.metric << ',' << fmt17(r.value)
        << '\n';
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) throw ParseError("report CSV header mismatch");
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 10) throw ParseError("report line " + std::to_string(line_no) + ": expected 10 fields");
    ReportRow r;
    r.task = f[0];
    r.format = f[1];
    r.range_lo = parse_int<std::int64_t>(f[2], line_no);
    r.range_hi = parse_int<std::int64_t>(f[3], line_no);
    r.mode = f[4];
    r.embedding = f[5];
    r.probe = f[6];
    r.shuffle_index = parse_int<std::uint64_t>(f[7], line_no);
    r.metric = f[8];
    r.value = parse_value(f[9], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<AggregateRow> aggregate(std::span<const ReportRow> rows) {
  using Key = std::tuple<std::string, std::string, std::int64_t, std::int64_t, std::string, std::string,
                         std::string, std::string>;
  std::map<Key, std::size_t> slot;
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> values;
  for (const auto& r : rows) {
    Key key{r.task, r.format, r.range_lo, r.range_hi, r.mode, r.embedding, r.probe, r.metric};
    auto [it, inserted] = slot.try_emplace(key, out.size());
    if (inserted) {
      AggregateRow a;
      a.task = r.task;
      a.format = r.format;
      a.range_lo = r.range_lo;
      a.range_hi = r.range_hi;
      a.mode = r.mode;
      a.embedding = r.embedding;
      a.probe = r.probe;
      a.metric = r.metric;
      out.push_back(a);
      values.emplace_back();
    }
    if (std::isnan(r.value)) ++out[it->second].failed;
    else values[it->second].push_back(r.value);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    auto& a = out[i];
    a.n = v.size();
    if (v.empty()) {
      a.mean = a.std = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    a.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) {
      a.std = std::nan("");
      continue;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

void write_aggregate_json(std::ostream& out, std::span<const AggregateRow> rows) {
  json arr = json::array();
  for (const auto& a : rows) {
    arr.push_back({{"task", a.task},
                   {"format", a.format},
                   {"range_lo", a.range_lo},
                   {"range_hi", a.range_hi},
                   {"mode", a.mode},
                   {"embedding", a.embedding},
                   {"probe", a.probe},
                   {"metric", a.metric},
                   {"mean", number_or_null(a.mean)},
                   {"std", number_or_null(a.std)},
                   {"n", a.n},
                   {"failed", a.failed}});
  }
  out << arr.dump(2) << '\n';
}

void write_table_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  std::vector<std::string> columns;
  std::vector<std::string> row_keys;
  std::map<std::pair<std::string, std::string>, std::string> cells;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v)
      if (x == s) return;
    v.push_back(s);
  };
  for (const auto& a : rows) {
    std::string col = a.task + " " + a.format;
    if (a.mode != "interpolate") col += " " + a.mode;
    col += " [" + std::to_string(a.range_lo) + ":" + std::to_string(a.range_hi) + "]";
    std::string row = a.embedding + "," + a.probe;
    add_unique(columns, col);
    add_unique(row_keys, row);
    std::string text = a.n == 0 ? "failed" : pm(a.mean, a.std, a.metric);
    if (a.failed > 0 && a.n > 0) text += " (" + std::to_string(a.failed) + " failed)";
    cells[{row, col}] = text;
  }
  out << "embedding,probe";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& r : row_keys) {
    out << r;
    for (const auto& c : columns) {
      out << ',';
      auto it = cells.find({r, c});
      if (it != cells.end()) out << it->second;
    }
    out << '\n';
  }
}

BundlePaths write_bundle(const std::filesystem::path& dir, std::span<const ExperimentResult> results) {
  std::filesystem::create_directories(dir);
  BundlePaths p{dir / "report.csv", dir / "aggregate.json", dir / "table.csv", dir / "provenance.json"};
  const auto rows = to_rows(results);
  const auto agg = aggregate(rows);

  std::ostringstream report, aggregate_text, table;
  write_report_csv(report, rows);
  write_aggregate_json(aggregate_text, agg);
  write_table_csv(table, agg);
  write_file(p.report_csv, report.str());
  write_file(p.aggregate_json, aggregate_text.str());
  write_file(p.table_csv, table.str());

  json prov;
  prov["tool"] = "numeracy";
  prov["version"] = NUMERACY_VERSION;
  prov["timestamp"] = timestamp_utc();
  json experiments = json::array();
  for (const auto& e : results) {
    json x;
    x["config"] = json::parse(to_json(e.config));
    json seeds = json::array();
    for (auto s : e.config.shuffles) {
      const taskgen::Range r = e.config.mode == Mode::Interpolate ? e.config.range : e.config.extrapolation.train_range;
      seeds.push_back({{"shuffle", s}, {"split_seed", split_seed(r, s)}});
    }
    x["seeds"] = seeds;
    json failures = json::array();
    for (const auto& c : e.cells)
      if (!c.ok)
        failures.push_back({{"shuffle", c.shuffle}, {"range", {c.range.lo, c.range.hi}}, {"error", c.error}});
    x["failures"] = failures;
    json timing = json::array();
    for (const auto& c : e.cells) timing.push_back({{"shuffle", c.shuffle}, {"seconds", c.seconds}, {"epochs", c.epochs}});
    x["cells"] = timing;
    experiments.push_back(x);
  }
  prov["experiments"] = experiments;
  write_file(p.provenance_json, prov.dump(2) + "\n");
  return p;
}

BundlePaths rebuild_aggregates(const std::filesystem::path& report_csv, const std::filesystem::path& dir) {
  std::ifstream in(report_csv);
  if (!in) throw ConfigError("cannot open " + report_csv.string());
  const auto rows = read_report_csv(in);
  const auto agg = aggregate(rows);
  std::filesystem::create_directories(dir);
  BundlePaths p{report_csv, dir / "aggregate.json", dir / "table.csv", {}};
  std::ostringstream aggregate_text, table;
  write_aggregate_json(aggregate_text, agg);
  write_table_csv(table, agg);
  write_file(p.aggregate_json, aggregate_text.str());
  write_file(p.table_csv, table.str());
  return p;
}

}  // namespace numeracy::runner
