#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "numeracy/nn/params.hpp"
#include "numeracy/numeral.hpp"

namespace numeracy::embed {

using nn::Matrix;
using numeral::NumberToken;

/// Opaque per-call state a trainable provider keeps for its backward pass.
class EncodeTape {
 public:
  virtual ~EncodeTape() = default;
};

/// Maps number tokens to fixed-dimension vectors.
///
/// Providers are pure functions of their parameters and the token: the same
/// token always encodes to the same bits. Frozen providers expose no
/// parameters; trainable ones expose a ParamStore that the probe trainer
/// optimises jointly with the probe head.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  virtual bool covers(const NumberToken& token) const = 0;

  /// dim x N; column i encodes tokens[i]. Throws CoverageError (or
  /// UnknownChar for character encoders) on an uncovered token.
  virtual Matrix encode(std::span<const NumberToken> tokens) const = 0;

  virtual bool trainable() const { return false; }
  virtual nn::ParamStore* parameters() { return nullptr; }
  virtual const nn::ParamStore* parameters() const { return nullptr; }
  std::size_t trainable_parameter_count() const {
    const auto* p = parameters();
    return p ? p->scalar_count() : 0;
  }

  /// Like encode, but records what backward() needs.
  virtual Matrix encode_for_training(std::span<const NumberToken> tokens,
                                     std::unique_ptr<EncodeTape>& tape) {
    tape.reset();
    return encode(tokens);
  }
  /// Accumulates parameter gradients given dL/d(output) for the tokens of
  /// the matching encode_for_training call. No-op for frozen providers.
  virtual void backward(const EncodeTape& /*tape*/, const Matrix& /*d_out*/) {}
};

/// Surfaces the provider cannot embed, sorted and de-duplicated. Empty means
/// every token is covered.
std::vector<std::string> validate_coverage(const EmbeddingProvider& provider,
                                           std::span<const NumberToken> tokens);

/// Fixed surface -> vector table, loaded from a file or drawn at random.
class EmbeddingTable final : public EmbeddingProvider {
 public:
  enum class Source { File, Random };

  EmbeddingTable(Eigen::Index dim, Source source, std::string label = {});

  std::string name() const override;
  Eigen::Index dim() const override { return dim_; }
  bool covers(const NumberToken& token) const override { return contains(token.surface()); }
  Matrix encode(std::span<const NumberToken> tokens) const override;

  Source source() const { return source_; }
  std::size_t size() const { return index_.size(); }
  bool contains(const std::string& surface) const { return index_.count(surface) != 0; }
  /// Throws CoverageError when absent.
  Eigen::VectorXd lookup(const std::string& surface) const;
  /// Adds or replaces an entry; throws DimMismatch on wrong length.
  void insert(const std::string& surface, const Eigen::Ref<const Eigen::VectorXd>& vec);
  /// Surfaces in insertion order.
  const std::vector<std::string>& surfaces() const { return surfaces_; }

 private:
  Eigen::Index dim_;
  Source source_;
  std::string label_;
  std::unordered_map<std::string, Eigen::Index> index_;
  std::vector<std::string> surfaces_;
  std::vector<double> data_;  // row-major by entry
};

/// Reads the text vector format: one `surface f1 ... fd` line per entry,
/// optionally preceded by a `count dim` header (a line of exactly two
/// integers). Throws BadVectorFile on ragged or non-numeric rows or a row
/// count that disagrees with the header, and DimMismatch when
/// `expected_dim` is given and differs.
EmbeddingTable load_table(const std::filesystem::path& path,
                          std::optional<Eigen::Index> expected_dim = std::nullopt);
EmbeddingTable parse_table(std::istream& in, const std::string& label,
                           std::optional<Eigen::Index> expected_dim = std::nullopt);

/// Writes `count dim` followed by one line per entry.
void write_table(std::ostream& out, const EmbeddingTable& table);

inline constexpr Eigen::Index kDefaultRandomDim = 300;

/// i.i.d. N(0, 1/dim) vectors. Each surface's vector depends only on
/// (seed, surface), so adding tokens never changes existing vectors.
EmbeddingTable random_table(std::span<const std::string> surfaces,
                            Eigen::Index dim = kDefaultRandomDim, std::uint64_t seed = 0);

struct ValueEmbedConfig {
  bool log_scale = true;
};

/// One-dimensional embedding of the token's own value. Log mode uses the
/// signed log sign(v) * log10(1 + |v|), which is odd, strictly increasing
/// and defined at zero.
class ValueEmbedding final : public EmbeddingProvider {
 public:
  explicit ValueEmbedding(ValueEmbedConfig config = {}) : config_(config) {}

  std::string name() const override { return config_.log_scale ? "value-log" : "value"; }
  Eigen::Index dim() const override { return 1; }
  bool covers(const NumberToken&) const override { return true; }
  Matrix encode(std::span<const NumberToken> tokens) const override;

  double embed(double value) const;

 private:
  ValueEmbedConfig config_;
};

}  // namespace numeracy::embed
