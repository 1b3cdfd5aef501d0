#include "numeracy/char_encoder.hpp"

#include <map>

#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy::embed {

int CharVocab::index(char c) {
  auto pos = kChars.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos) + 1;
}

bool CharVocab::covers(std::string_view surface) {
  if (surface.empty()) return false;
  for (char c : surface)
    if (index(c) < 0) return false;
  return true;
}

std::vector<int> CharVocab::left_padded(std::string_view surface, std::size_t min_length) {
  std::vector<int> out;
  const std::size_t pads = surface.size() < min_length ? min_length - surface.size() : 0;
  out.assign(pads, kPad);
  for (char c : surface) {
    int i = index(c);
    if (i < 0) throw UnknownChar("character '" + std::string(1, c) + "' in '" + std::string(surface) +
                                 "' is outside the character vocabulary");
    out.push_back(i);
  }
  return out;
}

std::string CharVocab::show_left_padded(std::string_view surface, std::size_t min_length) {
  std::string out;
  for (int i : left_padded(surface, min_length)) {
    if (i == kPad)
      out += "∅";
    else
      out += kChars[static_cast<std::size_t>(i - 1)];
  }
  return out;
}

namespace {

// Groups token positions by a key (sequence length) so each group can be
// batched through the same matrix shapes.
std::map<std::size_t, std::vector<int>> group_by_length(std::span<const NumberToken> tokens,
                                                        std::size_t min_length) {
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& s = tokens[i].surface();
    if (!CharVocab::covers(s))
      throw UnknownChar("surface '" + s + "' has characters outside the character vocabulary");
    groups[std::max(s.size(), min_length)].push_back(static_cast<int>(i));
  }
  return groups;
}

struct CnnWidth {
  Matrix windows;            // (w * d) x (n * positions)
  Matrix pooled;             // F x n, pre-activation maxima
  std::vector<int> argmax;   // F * n, column into windows (filter-major per token)
};

struct CnnGroup {
  std::vector<int> columns;  // output column per token
  std::vector<int> chars;    // n x length, row-major
  std::size_t length = 0;
  std::vector<CnnWidth> widths;
};

struct CnnTape final : EncodeTape {
  std::vector<CnnGroup> groups;
  Eigen::Index count = 0;
};

struct LstmGroup {
  std::vector<int> columns;
  nn::Lstm::Tape tape;
};

struct LstmTape final : EncodeTape {
  std::vector<LstmGroup> groups;
  Eigen::Index count = 0;
};

}  // namespace

CharCnnEncoder::CharCnnEncoder(CharCnnConfig config) : config_(config) {
  if (config_.char_dim <= 0 || config_.filters_per_width <= 0 || config_.min_width < 1 ||
      config_.max_width < config_.min_width) {
    throw ConfigError("invalid char-CNN configuration");
  }
  const int d = config_.char_dim;
  // The pad symbol has no column: it embeds as the zero vector.
  const int chars = CharVocab::size() - 1;
  char_embed_ = &store_.add("char_cnn.char_embed", d, chars);
  nn::xavier_uniform(char_embed_->value, chars, d, derive_seed({config_.seed, 0}));
  for (int w = config_.min_width; w <= config_.max_width; ++w) {
    auto& f = store_.add("char_cnn.filter" + std::to_string(w), config_.filters_per_width, w * d);
    nn::xavier_uniform(f.value, w * d, config_.filters_per_width,
                   derive_seed({config_.seed, static_cast<std::uint64_t>(w)}));
    filters_.push_back(&f);
    biases_.push_back(&store_.add("char_cnn.bias" + std::to_string(w), config_.filters_per_width, 1));
  }
}

Matrix CharCnnEncoder::run(std::span<const NumberToken> tokens, EncodeTape* tape_base) const {
  const auto d = static_cast<Eigen::Index>(config_.char_dim);
  const auto filters = static_cast<Eigen::Index>(config_.filters_per_width);
  const auto min_len = static_cast<std::size_t>(config_.max_width);
  Matrix out(dim(), static_cast<Eigen::Index>(tokens.size()));
  auto* tape = static_cast<CnnTape*>(tape_base);
  if (tape) {
    tape->groups.clear();
    tape->count = out.cols();
  }
  const Matrix& embed = char_embed_->value;

  for (auto& [length, members] : group_by_length(tokens, min_len)) {
    CnnGroup group;
    group.length = length;
    group.columns = members;
    const auto n = static_cast<Eigen::Index>(members.size());
    group.chars.reserve(members.size() * length);
    for (int m : members) {
      auto idx = CharVocab::left_padded(tokens[static_cast<std::size_t>(m)].surface(), min_len);
      group.chars.insert(group.chars.end(), idx.begin(), idx.end());
    }
    for (int w = config_.min_width; w <= config_.max_width; ++w) {
      const std::size_t wi = static_cast<std::size_t>(w - config_.min_width);
      const auto positions = static_cast<Eigen::Index>(length) - w + 1;
      CnnWidth cw;
      cw.windows.resize(w * d, n * positions);
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index p = 0; p < positions; ++p)
          for (int i = 0; i < w; ++i) {
            const int c = group.chars[static_cast<std::size_t>(k) * length + static_cast<std::size_t>(p + i)];
            auto slot = cw.windows.block(i * d, k * positions + p, d, 1);
            if (c == CharVocab::kPad) slot.setZero();
            else slot = embed.col(c - 1);
          }
      Matrix z = filters_[wi]->value * cw.windows;
      z.colwise() += biases_[wi]->value.col(0);
      cw.pooled.resize(filters, n);
      cw.argmax.resize(static_cast<std::size_t>(filters * n));
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index f = 0; f < filters; ++f) {
          Eigen::Index best = 0;
          double best_v = z(f, k * positions);
          for (Eigen::Index p = 1; p < positions; ++p) {
            double v = z(f, k * positions + p);
            if (v > best_v) {
              best_v = v;
              best = p;
            }
          }
          cw.pooled(f, k) = best_v;
          cw.argmax[static_cast<std::size_t>(k * filters + f)] = static_cast<int>(k * positions + best);
          out(static_cast<Eigen::Index>(wi) * filters + f, members[static_cast<std::size_t>(k)]) =
              best_v > 0.0 ? best_v : 0.0;
        }
      }
      if (tape) group.widths.push_back(std::move(cw));
    }
    if (tape) tape->groups.push_back(std::move(group));
  }
  return out;
}

Matrix CharCnnEncoder::encode(std::span<const NumberToken> tokens) const { return run(tokens, nullptr); }

Matrix CharCnnEncoder::encode_for_training(std::span<const NumberToken> tokens,
                                           std::unique_ptr<EncodeTape>& tape) {
  auto t = std::make_unique<CnnTape>();
  Matrix out = run(tokens, t.get());
  tape = std::move(t);
  return out;
}

void CharCnnEncoder::backward(const EncodeTape& tape_base, const Matrix& d_out) {
  if (!config_.trainable) return;
  const auto& tape = static_cast<const CnnTape&>(tape_base);
  const auto d = static_cast<Eigen::Index>(config_.char_dim);
  const auto filters = static_cast<Eigen::Index>(config_.filters_per_width);
  Matrix& d_embed = char_embed_->grad;
  for (const auto& group : tape.groups) {
    const auto n = static_cast<Eigen::Index>(group.columns.size());
    for (int w = config_.min_width; w <= config_.max_width; ++w) {
      const std::size_t wi = static_cast<std::size_t>(w - config_.min_width);
      const auto& cw = group.widths[wi];
      const auto positions = static_cast<Eigen::Index>(group.length) - w + 1;
      Matrix& d_filter = filters_[wi]->grad;
      Matrix& d_bias = biases_[wi]->grad;
      const Matrix& filter = filters_[wi]->value;
      for (Eigen::Index k = 0; k < n; ++k) {
        const int out_col = group.columns[static_cast<std::size_t>(k)];
        for (Eigen::Index f = 0; f < filters; ++f) {
          if (cw.pooled(f, k) <= 0.0) continue;
          const double dy = d_out(static_cast<Eigen::Index>(wi) * filters + f, out_col);
          if (dy == 0.0) continue;
          const int col = cw.argmax[static_cast<std::size_t>(k * filters + f)];
          d_filter.row(f) += dy * cw.windows.col(col).transpose();
          d_bias(f, 0) += dy;
          const Eigen::Index p = col - k * positions;
          Eigen::VectorXd dx = dy * filter.row(f).transpose();
          for (int i = 0; i < w; ++i) {
            const int c = group.chars[static_cast<std::size_t>(k) * group.length + static_cast<std::size_t>(p + i)];
            if (c != CharVocab::kPad) d_embed.col(c - 1) += dx.segment(i * d, d);
          }
        }
      }
    }
  }
}

CharLstmEncoder::CharLstmEncoder(CharLstmConfig config) : config_(config) {
  if (config_.char_dim <= 0 || config_.hidden <= 0) throw ConfigError("invalid char-LSTM configuration");
  char_embed_ = &store_.add("char_lstm.char_embed", config_.char_dim, CharVocab::size());
  nn::xavier_uniform(char_embed_->value, CharVocab::size(), config_.char_dim, derive_seed({config_.seed, 0}));
  lstm_ = nn::Lstm(store_, "char_lstm.lstm", config_.char_dim, config_.hidden, derive_seed({config_.seed, 1}));
}

Matrix CharLstmEncoder::run(std::span<const NumberToken> tokens, EncodeTape* tape_base) const {
  Matrix out(dim(), static_cast<Eigen::Index>(tokens.size()));
  auto* tape = static_cast<LstmTape*>(tape_base);
  if (tape) {
    tape->groups.clear();
    tape->count = out.cols();
  }
  for (auto& [length, members] : group_by_length(tokens, 1)) {
    const auto n = members.size();
    // Step-major character indices: entry t*n + b is character t of member b.
    std::vector<int> index(length * n);
    for (std::size_t b = 0; b < n; ++b) {
      const auto& s = tokens[static_cast<std::size_t>(members[b])].surface();
      for (std::size_t t = 0; t < length; ++t) index[t * n + b] = CharVocab::index(s[t]);
    }
    LstmGroup group;
    group.columns = members;
    Matrix hidden = lstm_.forward(char_embed_->value, index, static_cast<Eigen::Index>(length),
                                  tape ? &group.tape : nullptr);
    const auto last = hidden.rightCols(static_cast<Eigen::Index>(n));
    for (std::size_t b = 0; b < n; ++b) out.col(members[b]) = last.col(static_cast<Eigen::Index>(b));
    if (tape) tape->groups.push_back(std::move(group));
  }
  return out;
}

Matrix CharLstmEncoder::encode(std::span<const NumberToken> tokens) const { return run(tokens, nullptr); }

Matrix CharLstmEncoder::encode_for_training(std::span<const NumberToken> tokens,
                                            std::unique_ptr<EncodeTape>& tape) {
  auto t = std::make_unique<LstmTape>();
  Matrix out = run(tokens, t.get());
  tape = std::move(t);
  return out;
}

void CharLstmEncoder::backward(const EncodeTape& tape_base, const Matrix& d_out) {
  if (!config_.trainable) return;
  const auto& tape = static_cast<const LstmTape&>(tape_base);
  for (const auto& group : tape.groups) {
    const auto n = static_cast<Eigen::Index>(group.columns.size());
    Matrix d_hidden = Matrix::Zero(config_.hidden, group.tape.hidden.cols());
    for (Eigen::Index b = 0; b < n; ++b)
      d_hidden.col(d_hidden.cols() - n + b) = d_out.col(group.columns[static_cast<std::size_t>(b)]);
    char_embed_->grad += lstm_.backward(group.tape, d_hidden, true);
  }
}

}  // namespace numeracy::embed
