#include "numeracy/runner/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "numeracy/errors.hpp"

namespace numeracy::runner {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

taskgen::Range read_range(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ConfigError(what + " must be a two-element integer array");
  taskgen::Range r{j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
  if (r.hi < r.lo) throw ConfigError(what + " has hi < lo");
  return r;
}

json range_json(const taskgen::Range& r) { return json::array({r.lo, r.hi}); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"name", "task", "format", "range", "mode", "train_range", "test_ranges", "embedding", "probe",
              "train", "data", "shuffles", "parallelism"},
             "experiment");
  ExperimentConfig c;
  read(j, "name", c.name);
  try {
    if (j.contains("task")) c.task = probe::task_from_string(j.at("task").get<std::string>());
    if (j.contains("format")) c.format = numeral::format_from_string(j.at("format").get<std::string>());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("range")) c.range = read_range(j.at("range"), "range");

  std::string mode = "interpolate";
  read(j, "mode", mode);
  if (mode == "interpolate") {
    c.mode = Mode::Interpolate;
    if (j.contains("train_range") || j.contains("test_ranges"))
      throw ConfigError("train_range/test_ranges only apply to extrapolate mode");
  } else if (mode == "extrapolate") {
    c.mode = Mode::Extrapolate;
    if (!j.contains("train_range") || !j.contains("test_ranges"))
      throw ConfigError("extrapolate mode needs train_range and test_ranges");
    c.extrapolation.train_range = read_range(j.at("train_range"), "train_range");
    if (!j.at("test_ranges").is_array()) throw ConfigError("test_ranges must be an array");
    for (const auto& r : j.at("test_ranges")) c.extrapolation.test_ranges.push_back(read_range(r, "test range"));
    c.range = c.extrapolation.train_range;
  } else {
    throw ConfigError("mode must be 'interpolate' or 'extrapolate'");
  }

  if (j.contains("embedding")) {
    const json& e = j.at("embedding");
    check_keys(e,
               {"kind", "label", "trainable", "dim", "seed", "path", "expected_dim", "log_scale", "char_dim",
                "filters_per_width", "min_width", "max_width", "hidden"},
               "embedding");
    auto& s = c.embedding;
    std::string kind;
    read(e, "kind", kind);
    if (!kind.empty()) s.kind = embedding_kind_from_string(kind);
    read(e, "label", s.label);
    read(e, "trainable", s.trainable);
    read(e, "dim", s.dim);
    read(e, "seed", s.seed);
    read(e, "path", s.path);
    if (e.contains("expected_dim")) {
      Eigen::Index d = 0;
      read(e, "expected_dim", d);
      s.expected_dim = d;
    }
    read(e, "log_scale", s.log_scale);
    read(e, "char_dim", s.cnn.char_dim);
    read(e, "char_dim", s.lstm.char_dim);
    read(e, "filters_per_width", s.cnn.filters_per_width);
    read(e, "min_width", s.cnn.min_width);
    read(e, "max_width", s.cnn.max_width);
    read(e, "hidden", s.lstm.hidden);
    if (!s.path.empty() && !base_dir.empty() && std::filesystem::path(s.path).is_relative())
      s.path = (base_dir / s.path).string();
  }

  c.probe = probe::ProbeSpec::defaults(c.task);
  if (j.contains("probe")) {
    const json& p = j.at("probe");
    check_keys(p, {"head", "lstm_hidden", "mlp_hidden", "bidirectional"}, "probe");
    std::string head;
    read(p, "head", head);
    if (!head.empty()) c.probe.head = probe::head_from_string(head);
    read(p, "lstm_hidden", c.probe.lstm_hidden);
    if (p.contains("mlp_hidden")) {
      std::vector<int> widths;
      read(p, "mlp_hidden", widths);
      if (widths.size() != 2) throw ConfigError("mlp_hidden must list two widths");
      c.probe.mlp_hidden1 = widths[0];
      c.probe.mlp_hidden2 = widths[1];
    }
    read(p, "bidirectional", c.probe.bidirectional);
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    check_keys(t,
               {"max_epochs", "batch_size", "patience", "val_fraction", "seed", "lr", "beta1", "beta2", "eps",
                "min_updates_per_epoch", "max_updates_per_epoch"},
               "train");
    auto& tc = c.train;
    read(t, "max_epochs", tc.max_epochs);
    read(t, "batch_size", tc.batch_size);
    read(t, "patience", tc.patience);
    read(t, "val_fraction", tc.val_fraction);
    read(t, "seed", tc.seed);
    read(t, "lr", tc.adam.lr);
    read(t, "beta1", tc.adam.beta1);
    read(t, "beta2", tc.adam.beta2);
    read(t, "eps", tc.adam.eps);
    read(t, "min_updates_per_epoch", tc.min_updates_per_epoch);
    read(t, "max_updates_per_epoch", tc.max_updates_per_epoch);
  }

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d,
               {"train_lists", "test_lists", "variance_factor", "train_fraction", "add_subsample_threshold",
                "add_subsample_fraction", "float_shared_fraction"},
               "data");
    read(d, "train_lists", c.data.train_lists);
    read(d, "test_lists", c.data.test_lists);
    read(d, "variance_factor", c.data.variance_factor);
    read(d, "train_fraction", c.data.train_fraction);
    read(d, "add_subsample_threshold", c.data.add_subsample_threshold);
    read(d, "add_subsample_fraction", c.data.add_subsample_fraction);
    read(d, "float_shared_fraction", c.data.float_shared_fraction);
  }

  read(j, "shuffles", c.shuffles);
  read(j, "parallelism", c.parallelism);
  c.validate();
  return c;
}

}  // namespace

std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::Random: return "random";
    case EmbeddingKind::Value: return "value";
    case EmbeddingKind::File: return "file";
    case EmbeddingKind::CharCnn: return "char_cnn";
    case EmbeddingKind::CharLstm: return "char_lstm";
  }
  return "unknown";
}

EmbeddingKind embedding_kind_from_string(std::string_view name) {
  if (name == "random") return EmbeddingKind::Random;
  if (name == "value") return EmbeddingKind::Value;
  if (name == "file") return EmbeddingKind::File;
  if (name == "char_cnn" || name == "char-cnn") return EmbeddingKind::CharCnn;
  if (name == "char_lstm" || name == "char-lstm") return EmbeddingKind::CharLstm;
  throw ConfigError("unknown embedding kind '" + std::string(name) + "'");
}

std::string EmbeddingSpec::display_name() const {
  if (!label.empty()) return label;
  switch (kind) {
    case EmbeddingKind::Random: return "random-vectors";
    case EmbeddingKind::Value: return log_scale ? "value-embedding" : "value-embedding-raw";
    case EmbeddingKind::File: return std::filesystem::path(path).stem().string();
    case EmbeddingKind::CharCnn: return trainable ? "char-cnn" : "untrained-cnn";
    case EmbeddingKind::CharLstm: return trainable ? "char-lstm" : "untrained-lstm";
  }
  return "unknown";
}

std::string_view to_string(Mode mode) { return mode == Mode::Interpolate ? "interpolate" : "extrapolate"; }

probe::TrainConfig ExperimentConfig::default_train_config() {
  probe::TrainConfig t;
  t.max_epochs = 100;
  t.batch_size = 32;
  t.patience = 5;
  t.val_fraction = 0.1;
  t.min_updates_per_epoch = 100;
  return t;
}

void ExperimentConfig::validate() const {
  using numeral::NumberFormat;
  if (shuffles.empty()) throw ConfigError("shuffle seed list must be nonempty");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (range.hi < range.lo) throw ConfigError("range has hi < lo");
  probe.validate();
  train.validate();
  if (probe.task != task) throw ConfigError("probe task does not match experiment task");
  if (data.train_fraction <= 0.0 || data.train_fraction >= 1.0)
    throw ConfigError("train_fraction must be in (0, 1)");
  if (data.variance_factor < 0.0) throw ConfigError("variance_factor must be nonnegative");
  if (data.add_subsample_fraction <= 0.0 || data.add_subsample_fraction > 1.0)
    throw ConfigError("add_subsample_fraction must be in (0, 1]");

  std::vector<taskgen::Range> ranges{range};
  if (mode == Mode::Extrapolate) {
    extrapolation.validate();
    ranges = extrapolation.test_ranges;
    ranges.push_back(extrapolation.train_range);
  }
  for (const auto& r : ranges) {
    switch (format) {
      case NumberFormat::Words:
        if (r.lo < 0 || r.hi > 99) throw ConfigError("word-form numbers require a range within [0, 99]");
        break;
      case NumberFormat::Digits:
      case NumberFormat::Float1:
        if (r.lo < 0) throw ConfigError("this format requires nonnegative ranges; use 'negative'");
        break;
      case NumberFormat::NegativeDigits: break;
    }
  }
  if (format == NumberFormat::Float1 && task != probe::Task::ListMax)
    throw ConfigError("float1 ranges are only supported for list max");
  if (embedding.kind == EmbeddingKind::File && embedding.path.empty())
    throw ConfigError("file embeddings need a path");
  if (embedding.kind == EmbeddingKind::Random && embedding.dim <= 0)
    throw ConfigError("random embedding dimension must be positive");
}

ExperimentConfig parse_experiment(std::string_view json_text) { return from_json(parse_json(json_text), {}); }

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return from_json(parse_json(read_file(path)), path.parent_path());
}

std::string to_json(const ExperimentConfig& c, int indent) {
  json j;
  j["name"] = c.name;
  j["task"] = probe::to_string(c.task);
  j["format"] = numeral::to_string(c.format);
  j["mode"] = to_string(c.mode);
  if (c.mode == Mode::Extrapolate) {
    j["train_range"] = range_json(c.extrapolation.train_range);
    json tests = json::array();
    for (const auto& r : c.extrapolation.test_ranges) tests.push_back(range_json(r));
    j["test_ranges"] = tests;
  } else {
    j["range"] = range_json(c.range);
  }
  const auto& e = c.embedding;
  j["embedding"] = {{"kind", to_string(e.kind)}, {"label", e.display_name()}, {"trainable", e.trainable},
                    {"dim", e.dim},          {"seed", e.seed},                {"path", e.path},
                    {"log_scale", e.log_scale}};
  if (e.kind == EmbeddingKind::CharCnn) {
    j["embedding"]["char_dim"] = e.cnn.char_dim;
    j["embedding"]["filters_per_width"] = e.cnn.filters_per_width;
    j["embedding"]["min_width"] = e.cnn.min_width;
    j["embedding"]["max_width"] = e.cnn.max_width;
  } else if (e.kind == EmbeddingKind::CharLstm) {
    j["embedding"]["char_dim"] = e.lstm.char_dim;
    j["embedding"]["hidden"] = e.lstm.hidden;
  }
  if (e.expected_dim) j["embedding"]["expected_dim"] = *e.expected_dim;
  j["probe"] = {{"head", probe::to_string(c.probe.head)},
                {"lstm_hidden", c.probe.lstm_hidden},
                {"mlp_hidden", {c.probe.mlp_hidden1, c.probe.mlp_hidden2}},
                {"bidirectional", c.probe.bidirectional}};
  const auto& t = c.train;
  j["train"] = {{"max_epochs", t.max_epochs},
                {"batch_size", t.batch_size},
                {"patience", t.patience},
                {"val_fraction", t.val_fraction},
                {"seed", t.seed},
                {"lr", t.adam.lr},
                {"beta1", t.adam.beta1},
                {"beta2", t.adam.beta2},
                {"eps", t.adam.eps},
                {"min_updates_per_epoch", t.min_updates_per_epoch},
                {"max_updates_per_epoch", t.max_updates_per_epoch}};
  const auto& d = c.data;
  j["data"] = {{"train_lists", d.train_lists},
               {"test_lists", d.test_lists},
               {"variance_factor", d.variance_factor},
               {"train_fraction", d.train_fraction},
               {"add_subsample_threshold", d.add_subsample_threshold},
               {"add_subsample_fraction", d.add_subsample_fraction},
               {"float_shared_fraction", d.float_shared_fraction}};
  j["shuffles"] = c.shuffles;
  j["parallelism"] = c.parallelism;
  return j.dump(indent);
}

bool is_manifest(std::string_view json_text) {
  json j = parse_json(json_text);
  return j.is_object() && j.contains("experiments");
}

SuiteManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j = parse_json(json_text);
  check_keys(j, {"name", "description", "defaults", "experiments"}, "manifest");
  SuiteManifest m;
  read(j, "name", m.name);
  json defaults = j.value("defaults", json::object());
  if (!j.contains("experiments") || !j.at("experiments").is_array())
    throw ConfigError("manifest needs an 'experiments' array");
  std::size_t i = 0;
  for (const auto& entry : j.at("experiments")) {
    json merged = defaults;
    merged.merge_patch(entry);
    try {
      m.experiments.push_back(from_json(merged, base_dir));
    } catch (const ConfigError& e) {
      throw ConfigError("experiment #" + std::to_string(i) + ": " + e.what());
    }
    ++i;
  }
  return m;
}

SuiteManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

}  // namespace numeracy::runner
