#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "numeracy/embedding.hpp"
#include "numeracy/errors.hpp"

namespace numeracy::embed {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_count(std::string_view s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

}  // namespace

EmbeddingTable parse_table(std::istream& in, const std::string& label,
                           std::optional<Eigen::Index> expected_dim) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<Eigen::Index> dim;
  std::optional<EmbeddingTable> table;
  bool first = true;
  std::optional<long long> declared;
  Eigen::VectorXd vec;

  auto fail = [&](const std::string& why) -> void {
    throw BadVectorFile(label + ":" + std::to_string(line_no) + ": " + why);
  };
  auto ensure_table = [&](Eigen::Index d) {
    if (expected_dim && *expected_dim != d) {
      throw DimMismatch(label + ": dimension " + std::to_string(d) + ", expected " +
                        std::to_string(*expected_dim));
    }
    dim = d;
    table.emplace(d, EmbeddingTable::Source::File, label);
    vec.resize(d);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      long long count = 0, d = 0;
      if (fields.size() == 2 && parse_count(fields[0], count) && parse_count(fields[1], d)) {
        if (d == 0) fail("header declares zero dimensions");
        declared = count;
        ensure_table(static_cast<Eigen::Index>(d));
        continue;
      }
    }
    if (fields.size() < 2) fail("row has no vector values");
    const auto row_dim = static_cast<Eigen::Index>(fields.size() - 1);
    if (!dim) ensure_table(row_dim);
    if (row_dim != *dim) {
      fail("row for '" + std::string(fields[0]) + "' has " + std::to_string(row_dim) +
           " values, expected " + std::to_string(*dim));
    }
    for (Eigen::Index i = 0; i < row_dim; ++i) {
      if (!parse_double(fields[static_cast<std::size_t>(i) + 1], vec(i)))
        fail("non-numeric value '" + std::string(fields[static_cast<std::size_t>(i) + 1]) + "'");
    }
    std::string surface(fields[0]);
    if (table->contains(surface)) fail("duplicate surface '" + surface + "'");
    table->insert(surface, vec);
  }
  if (declared && table && static_cast<long long>(table->size()) != *declared) {
    throw BadVectorFile(label + ": header declares " + std::to_string(*declared) + " rows, found " +
                        std::to_string(table->size()));
  }
  if (!table) {
    if (expected_dim) return EmbeddingTable(*expected_dim, EmbeddingTable::Source::File, label);
    throw BadVectorFile(label + ": empty vector file");
  }
  return std::move(*table);
}

EmbeddingTable load_table(const std::filesystem::path& path, std::optional<Eigen::Index> expected_dim) {
  std::ifstream in(path);
  if (!in) throw BadVectorFile("cannot open vector file " + path.string());
  return parse_table(in, path.filename().string(), expected_dim);
}

void write_table(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  out << std::setprecision(17);
  for (const auto& s : table.surfaces()) {
    out << s;
    const auto v = table.lookup(s);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
    out << '\n';
  }
}

}  // namespace numeracy::embed
