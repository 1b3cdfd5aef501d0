#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "numeracy/runner/experiment.hpp"

namespace numeracy::runner {

/// One line of the per-shuffle report CSV.
struct ReportRow {
  std::string task;
  std::string format;
  std::int64_t range_lo = 0;
  std::int64_t range_hi = 0;
  std::string mode;
  std::string embedding;
  std::string probe;
  std::uint64_t shuffle_index = 0;
  std::string metric;
  /// NaN for failed cells.
  double value = 0.0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

ReportRow to_row(const CellResult& cell);
std::vector<ReportRow> to_rows(std::span<const ExperimentResult> results);

inline constexpr const char* kReportHeader =
    "task,format,range_lo,range_hi,mode,embedding,probe,shuffle_index,metric,value";

/// Values are written with 17 significant digits, so reading back is exact.
void write_report_csv(std::ostream& out, std::span<const ReportRow> rows);
/// Throws ParseError on a malformed file.
std::vector<ReportRow> read_report_csv(std::istream& in);

/// Mean and sample standard deviation of one (task, format, range, mode,
/// embedding, probe, metric) group over its successful shuffles.
struct AggregateRow {
  std::string task;
  std::string format;
  std::int64_t range_lo = 0;
  std::int64_t range_hi = 0;
  std::string mode;
  std::string embedding;
  std::string probe;
  std::string metric;
  double mean = 0.0;
  /// NaN when fewer than two shuffles succeeded.
  double std = 0.0;
  std::size_t n = 0;
  std::size_t failed = 0;
};

/// Groups keep first-appearance order.
std::vector<AggregateRow> aggregate(std::span<const ReportRow> rows);

void write_aggregate_json(std::ostream& out, std::span<const AggregateRow> rows);

/// One row per (embedding, probe); one column per (task, format, mode,
/// range), each cell "mean ± std". Missing combinations are left empty.
void write_table_csv(std::ostream& out, std::span<const AggregateRow> rows);

struct BundlePaths {
  std::filesystem::path report_csv;
  std::filesystem::path aggregate_json;
  std::filesystem::path table_csv;
  std::filesystem::path provenance_json;
};

/// Writes report.csv, aggregate.json, table.csv and provenance.json (tool
/// version, timestamp, seeds, config echoes and failure messages) into
/// `dir`, creating it if needed. Only provenance.json varies between
/// identical runs.
BundlePaths write_bundle(const std::filesystem::path& dir, std::span<const ExperimentResult> results);

/// Rebuilds aggregate.json and table.csv from an existing report.csv.
BundlePaths rebuild_aggregates(const std::filesystem::path& report_csv, const std::filesystem::path& dir);

}  // namespace numeracy::runner
