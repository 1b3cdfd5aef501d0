#include "numeracy/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy {

namespace {
std::string join_missing(const std::vector<std::string>& missing) {
  std::string out = "no embedding for " + std::to_string(missing.size()) + " surface(s):";
  for (std::size_t i = 0; i < missing.size() && i < 10; ++i) out += " '" + missing[i] + "'";
  if (missing.size() > 10) out += " ...";
  return out;
}
}  // namespace

CoverageError::CoverageError(std::vector<std::string> missing)
    : Error(join_missing(missing)), missing_(std::move(missing)) {}

}  // namespace numeracy

namespace numeracy::embed {

std::vector<std::string> validate_coverage(const EmbeddingProvider& provider,
                                           std::span<const NumberToken> tokens) {
  std::vector<std::string> missing;
  for (const auto& t : tokens)
    if (!provider.covers(t)) missing.push_back(t.surface());
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  return missing;
}

EmbeddingTable::EmbeddingTable(Eigen::Index dim, Source source, std::string label)
    : dim_(dim), source_(source), label_(std::move(label)) {
  if (dim <= 0) throw DimMismatch("embedding dimension must be positive");
}

std::string EmbeddingTable::name() const {
  if (!label_.empty()) return label_;
  return source_ == Source::Random ? "random" : "file";
}

Matrix EmbeddingTable::encode(std::span<const NumberToken> tokens) const {
  Matrix out(dim_, static_cast<Eigen::Index>(tokens.size()));
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = index_.find(tokens[i].surface());
    if (it == index_.end()) {
      missing.push_back(tokens[i].surface());
      continue;
    }
    out.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(data_.data() + it->second * dim_, dim_);
  }
  if (!missing.empty()) throw CoverageError(std::move(missing));
  return out;
}

Eigen::VectorXd EmbeddingTable::lookup(const std::string& surface) const {
  auto it = index_.find(surface);
  if (it == index_.end()) throw CoverageError({surface});
  return Eigen::Map<const Eigen::VectorXd>(data_.data() + it->second * dim_, dim_);
}

void EmbeddingTable::insert(const std::string& surface, const Eigen::Ref<const Eigen::VectorXd>& vec) {
  if (vec.size() != dim_) {
    throw DimMismatch("vector for '" + surface + "' has " + std::to_string(vec.size()) +
                      " values, table dimension is " + std::to_string(dim_));
  }
  auto [it, inserted] = index_.try_emplace(surface, static_cast<Eigen::Index>(surfaces_.size()));
  if (inserted) {
    surfaces_.push_back(surface);
    data_.resize(data_.size() + static_cast<std::size_t>(dim_));
  }
  Eigen::Map<Eigen::VectorXd>(data_.data() + it->second * dim_, dim_) = vec;
}

EmbeddingTable random_table(std::span<const std::string> surfaces, Eigen::Index dim,
                            std::uint64_t seed) {
  EmbeddingTable table(dim, EmbeddingTable::Source::Random);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::VectorXd vec(dim);
  for (const auto& s : surfaces) {
    if (table.contains(s)) continue;
    Rng rng(derive_seed({seed, fnv1a(s)}));
    for (Eigen::Index i = 0; i < dim; ++i) vec(i) = rng.normal(0.0, stddev);
    table.insert(s, vec);
  }
  return table;
}

double ValueEmbedding::embed(double value) const {
  if (!config_.log_scale) return value;
  const double mag = std::log10(1.0 + std::abs(value));
  return value < 0 ? -mag : mag;
}

Matrix ValueEmbedding::encode(std::span<const NumberToken> tokens) const {
  Matrix out(1, static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out(0, static_cast<Eigen::Index>(i)) = embed(tokens[i].value());
  return out;
}

}  // namespace numeracy::embed
