#include "numeracy/probe/dataset.hpp"

#include <ostream>
#include <unordered_map>

#include "numeracy/errors.hpp"

namespace numeracy::probe {
namespace {

class VocabBuilder {
 public:
  explicit VocabBuilder(ProbeDataset& ds) : ds_(ds) {}
  void add(const NumberToken& t) {
    auto [it, inserted] = lookup_.try_emplace(t.surface(), static_cast<int>(ds_.vocab.size()));
    if (inserted) ds_.vocab.push_back(t);
    ds_.ids.push_back(it->second);
  }

 private:
  ProbeDataset& ds_;
  std::unordered_map<std::string, int> lookup_;
};

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::ListMax: return "listmax";
    case Task::Decode: return "decode";
    case Task::Add: return "add";
  }
  return "unknown";
}

Task task_from_string(std::string_view name) {
  if (name == "listmax" || name == "list_max") return Task::ListMax;
  if (name == "decode" || name == "decoding") return Task::Decode;
  if (name == "add" || name == "addition") return Task::Add;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

int slots_for(Task task) {
  switch (task) {
    case Task::ListMax: return static_cast<int>(taskgen::kListLength);
    case Task::Decode: return 1;
    case Task::Add: return 2;
  }
  return 0;
}

ProbeDataset ProbeDataset::subset(std::span<const std::size_t> rows) const {
  ProbeDataset out;
  out.task = task;
  out.vocab = vocab;
  const auto s = static_cast<std::size_t>(slots());
  out.ids.reserve(rows.size() * s);
  out.targets.reserve(rows.size());
  for (auto r : rows) {
    out.ids.insert(out.ids.end(), ids.begin() + static_cast<std::ptrdiff_t>(r * s),
                   ids.begin() + static_cast<std::ptrdiff_t>((r + 1) * s));
    out.targets.push_back(targets[r]);
  }
  return out;
}

ProbeDataset make_dataset(std::span<const taskgen::ListMaxInstance> data) {
  ProbeDataset ds;
  ds.task = Task::ListMax;
  VocabBuilder vb(ds);
  for (const auto& inst : data) {
    for (const auto& t : inst.tokens) vb.add(t);
    ds.targets.push_back(inst.label);
  }
  return ds;
}

ProbeDataset make_dataset(std::span<const taskgen::DecodeInstance> data) {
  ProbeDataset ds;
  ds.task = Task::Decode;
  VocabBuilder vb(ds);
  for (const auto& inst : data) {
    vb.add(inst.token);
    ds.targets.push_back(inst.target);
  }
  return ds;
}

ProbeDataset make_dataset(std::span<const taskgen::AddInstance> data) {
  ProbeDataset ds;
  ds.task = Task::Add;
  VocabBuilder vb(ds);
  for (const auto& inst : data) {
    vb.add(inst.a);
    vb.add(inst.b);
    ds.targets.push_back(inst.target);
  }
  return ds;
}

void write_tsv(std::ostream& out, const ProbeDataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int s = 0; s < data.slots(); ++s) out << data.token(i, s).surface() << '\t';
    out << data.targets[i] << '\n';
  }
}

}  // namespace numeracy::probe
