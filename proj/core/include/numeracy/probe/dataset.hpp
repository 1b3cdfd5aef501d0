#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "numeracy/taskgen.hpp"

namespace numeracy::probe {

using numeral::NumberToken;

enum class Task { ListMax, Decode, Add };

std::string_view to_string(Task task);
/// Accepts "listmax", "decode", "add".
Task task_from_string(std::string_view name);
int slots_for(Task task);

/// Task instances flattened for training: distinct tokens are stored once
/// and examples refer to them by index.
struct ProbeDataset {
  Task task = Task::Decode;
  std::vector<NumberToken> vocab;
  /// size() * slots entries, example-major: ids[i * slots + s].
  std::vector<int> ids;
  /// Class label (list max) or regression target.
  std::vector<double> targets;

  int slots() const { return slots_for(task); }
  std::size_t size() const { return targets.size(); }
  bool empty() const { return targets.empty(); }
  const NumberToken& token(std::size_t example, int slot) const {
    return vocab[static_cast<std::size_t>(ids[example * static_cast<std::size_t>(slots()) + static_cast<std::size_t>(slot)])];
  }
  /// Rows in the given order; vocabulary is shared, not compacted.
  ProbeDataset subset(std::span<const std::size_t> rows) const;
};

ProbeDataset make_dataset(std::span<const taskgen::ListMaxInstance> data);
ProbeDataset make_dataset(std::span<const taskgen::DecodeInstance> data);
ProbeDataset make_dataset(std::span<const taskgen::AddInstance> data);

/// Same layout as taskgen::write_tsv: the slot surfaces, then the target.
void write_tsv(std::ostream& out, const ProbeDataset& data);

}  // namespace numeracy::probe
