#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "numeracy/embedding.hpp"
#include "numeracy/nn/layers.hpp"

namespace numeracy::embed {

/// Character inventory shared by the character encoders: index 0 is the
/// pad symbol, then digits, lowercase letters, '-' and '.'.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr std::string_view kChars = "0123456789abcdefghijklmnopqrstuvwxyz-.";

  static int size() { return static_cast<int>(kChars.size()) + 1; }
  /// -1 for characters outside the inventory.
  static int index(char c);
  static bool covers(std::string_view surface);

  /// Character indices with pad symbols prepended up to `min_length`.
  /// Throws UnknownChar.
  static std::vector<int> left_padded(std::string_view surface, std::size_t min_length);
  /// Same, rendered with U+2205 for pads (for diagnostics).
  static std::string show_left_padded(std::string_view surface, std::size_t min_length);
};

struct CharCnnConfig {
  int char_dim = 20;
  int min_width = 1;
  int max_width = 7;
  int filters_per_width = 16;
  bool trainable = true;
  std::uint64_t seed = 0;

  int output_dim() const { return (max_width - min_width + 1) * filters_per_width; }
};

/// Character CNN: left-pad to at least max_width characters, embed (pads
/// as the zero vector), run
/// one filter bank per width, max-pool over positions, then ReLU, and
/// concatenate the pooled features of all widths.
class CharCnnEncoder final : public EmbeddingProvider {
 public:
  explicit CharCnnEncoder(CharCnnConfig config = {});

  std::string name() const override { return config_.trainable ? "char-cnn" : "untrained-cnn"; }
  Eigen::Index dim() const override { return config_.output_dim(); }
  bool covers(const NumberToken& token) const override { return CharVocab::covers(token.surface()); }
  Matrix encode(std::span<const NumberToken> tokens) const override;

  bool trainable() const override { return config_.trainable; }
  nn::ParamStore* parameters() override { return config_.trainable ? &store_ : nullptr; }
  const nn::ParamStore* parameters() const override { return config_.trainable ? &store_ : nullptr; }
  Matrix encode_for_training(std::span<const NumberToken> tokens,
                             std::unique_ptr<EncodeTape>& tape) override;
  void backward(const EncodeTape& tape, const Matrix& d_out) override;

  const CharCnnConfig& config() const { return config_; }
  /// Every parameter, trainable or not (for checkpoints and tests).
  nn::ParamStore& all_parameters() { return store_; }

 private:
  Matrix run(std::span<const NumberToken> tokens, EncodeTape* tape) const;

  CharCnnConfig config_;
  nn::ParamStore store_;
  nn::Param* char_embed_ = nullptr;  // char_dim x (vocab - 1), no pad column
  std::vector<nn::Param*> filters_;  // per width: F x (w * char_dim)
  std::vector<nn::Param*> biases_;   // per width: F x 1
};

struct CharLstmConfig {
  int char_dim = 20;
  int hidden = 64;
  bool trainable = true;
  std::uint64_t seed = 0;
};

/// Character LSTM read left to right; the token vector is the final hidden
/// state. No padding is involved.
class CharLstmEncoder final : public EmbeddingProvider {
 public:
  explicit CharLstmEncoder(CharLstmConfig config = {});

  std::string name() const override { return config_.trainable ? "char-lstm" : "untrained-lstm"; }
  Eigen::Index dim() const override { return config_.hidden; }
  bool covers(const NumberToken& token) const override { return CharVocab::covers(token.surface()); }
  Matrix encode(std::span<const NumberToken> tokens) const override;

  bool trainable() const override { return config_.trainable; }
  nn::ParamStore* parameters() override { return config_.trainable ? &store_ : nullptr; }
  const nn::ParamStore* parameters() const override { return config_.trainable ? &store_ : nullptr; }
  Matrix encode_for_training(std::span<const NumberToken> tokens,
                             std::unique_ptr<EncodeTape>& tape) override;
  void backward(const EncodeTape& tape, const Matrix& d_out) override;

  const CharLstmConfig& config() const { return config_; }
  nn::ParamStore& all_parameters() { return store_; }

 private:
  Matrix run(std::span<const NumberToken> tokens, EncodeTape* tape) const;

  CharLstmConfig config_;
  nn::ParamStore store_;
  nn::Param* char_embed_ = nullptr;  // char_dim x vocab
  nn::Lstm lstm_;
};

}  // namespace numeracy::embed
