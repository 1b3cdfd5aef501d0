#include "numeracy/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "numeracy/errors.hpp"
#include "numeracy/random.hpp"

namespace numeracy::taskgen {
namespace {

std::vector<std::int64_t> sorted_unique(std::span<const std::int64_t> pool) {
  std::vector<std::int64_t> out(pool.begin(), pool.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Index of the pool value nearest to x; ties go to the smaller value.
std::size_t nearest_index(const std::vector<std::int64_t>& pool, double x) {
  auto it = std::lower_bound(pool.begin(), pool.end(), x,
                             [](std::int64_t v, double target) { return static_cast<double>(v) < target; });
  if (it == pool.begin()) return 0;
  if (it == pool.end()) return pool.size() - 1;
  std::size_t hi = static_cast<std::size_t>(it - pool.begin());
  std::size_t lo = hi - 1;
  double d_lo = x - static_cast<double>(pool[lo]);
  double d_hi = static_cast<double>(pool[hi]) - x;
  return d_hi < d_lo ? hi : lo;
}

// Nearest pool index to x not present in `taken`; ties go to the smaller value.
std::size_t nearest_unused(const std::vector<std::int64_t>& pool, double x,
                           const std::vector<std::size_t>& taken) {
  auto is_taken = [&](std::size_t i) {
    return std::find(taken.begin(), taken.end(), i) != taken.end();
  };
  std::size_t best = pool.size();
  double best_d = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (is_taken(i)) continue;
    double d = std::abs(static_cast<double>(pool[i]) - x);
    if (best == pool.size() || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

template <class Container>
int argmax_units(const Container& tokens) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(tokens.size()); ++i)
    if (tokens[static_cast<std::size_t>(i)].units() > tokens[static_cast<std::size_t>(best)].units()) best = i;
  return best;
}

}  // namespace

PoolSplit make_split(Range range, std::uint64_t seed, double train_fraction) {
  PoolSplit split;
  split.range = range;
  split.seed = seed;
  if (range.size() <= 0) {
    split.degenerate = true;
    return split;
  }
  std::vector<std::int64_t> values(static_cast<std::size_t>(range.size()));
  std::iota(values.begin(), values.end(), range.lo);
  Rng rng(seed);
  rng.shuffle(std::span<std::int64_t>(values));
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(values.size())));
  n_train = std::min(n_train, values.size());
  split.train_pool.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test_pool.assign(values.begin() + static_cast<std::ptrdiff_t>(n_train), values.end());
  std::sort(split.train_pool.begin(), split.train_pool.end());
  std::sort(split.test_pool.begin(), split.test_pool.end());
  split.degenerate = split.train_pool.empty() || split.test_pool.empty();
  return split;
}

int argmax_label(const std::array<NumberToken, kListLength>& tokens) {
  return argmax_units(tokens);
}

std::vector<ListMaxInstance> gen_listmax(std::span<const std::int64_t> pool_in,
                                         const ListMaxOptions& options) {
  const auto pool = sorted_unique(pool_in);
  if (pool.size() < kListLength) {
    throw PoolTooSmall("list-max needs at least 5 distinct pool values, got " +
                       std::to_string(pool.size()));
  }
  for (auto v : pool) {
    if (!numeral::representable(v, options.format))
      throw FormatRangeError("pool value " + std::to_string(v) + " not representable as " +
                             std::string(numeral::to_string(options.format)));
  }
  const double sigma =
      std::sqrt(std::max(0.0, options.variance_factor * static_cast<double>(options.range_size)));
  Rng rng(options.seed);
  std::vector<ListMaxInstance> out;
  out.reserve(options.count);
  std::vector<std::size_t> taken;
  for (std::size_t n = 0; n < options.count; ++n) {
    const double base = static_cast<double>(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
    taken.clear();
    for (std::size_t slot = 0; slot < kListLength; ++slot) {
      std::size_t pick = pool.size();
      double candidate = base;
      for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        candidate = base + sigma * rng.normal();
        std::size_t idx = nearest_index(pool, candidate);
        if (std::find(taken.begin(), taken.end(), idx) == taken.end()) {
          pick = idx;
          break;
        }
      }
      if (pick == pool.size()) pick = nearest_unused(pool, candidate, taken);
      taken.push_back(pick);
    }
    rng.shuffle(std::span<std::size_t>(taken));
    ListMaxInstance inst;
    for (std::size_t slot = 0; slot < kListLength; ++slot)
      inst.tokens[slot] = NumberToken(pool[taken[slot]], options.format);
    inst.label = argmax_label(inst.tokens);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<DecodeInstance> gen_decode(std::span<const std::int64_t> pool, NumberFormat format) {
  std::vector<DecodeInstance> out;
  out.reserve(pool.size());
  for (auto v : pool) {
    NumberToken token(v, format);
    double target = token.value();
    out.push_back({std::move(token), target});
  }
  return out;
}

std::vector<AddInstance> gen_add(std::span<const std::int64_t> pool, NumberFormat format,
                                 double subsample_fraction, std::uint64_t seed) {
  const std::size_t n = pool.size();
  const std::size_t total = n * n;
  std::size_t keep = total;
  if (subsample_fraction < 1.0) {
    keep = static_cast<std::size_t>(std::llround(std::max(0.0, subsample_fraction) * static_cast<double>(total)));
  }
  std::vector<NumberToken> tokens;
  tokens.reserve(n);
  for (auto v : pool) tokens.emplace_back(v, format);

  std::vector<AddInstance> out;
  out.reserve(keep);
  Rng rng(seed);
  // Selection sampling: exactly `keep` of `total`, in enumeration order.
  std::size_t needed = keep;
  for (std::size_t k = 0; k < total && needed > 0; ++k) {
    std::size_t remaining = total - k;
    if (needed < remaining && rng.below(remaining) >= needed) continue;
    const auto& a = tokens[k / n];
    const auto& b = tokens[k % n];
    out.push_back({a, b, a.value() + b.value()});
    --needed;
  }
  return out;
}

double add_subsample_fraction(std::int64_t range_size, std::int64_t threshold, double fraction) {
  return range_size > threshold ? fraction : 1.0;
}

std::vector<ListMaxInstance> gen_listmax_float(std::span<const std::int64_t> integer_pool_in,
                                               const FloatListOptions& options) {
  const auto pool = sorted_unique(integer_pool_in);
  if (pool.empty()) throw PoolTooSmall("float list-max needs a nonempty integer pool");
  for (auto v : pool)
    if (v < 0) throw FormatRangeError("float lists require nonnegative integer parts");
  const double sigma =
      std::sqrt(std::max(0.0, options.variance_factor * static_cast<double>(options.range_size)));
  Rng rng(options.seed);
  std::vector<ListMaxInstance> out;
  out.reserve(options.count);
  std::array<std::int64_t, 10> digits{};
  std::iota(digits.begin(), digits.end(), 0);
  std::vector<std::int64_t> values;
  for (std::size_t n = 0; n < options.count; ++n) {
    values.clear();
    const std::int64_t base = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    if (rng.bernoulli(options.shared_fraction)) {
      // Partial Fisher-Yates: first five entries become distinct decimals.
      for (std::size_t i = 0; i < kListLength; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(digits.size() - i));
        std::swap(digits[i], digits[j]);
        values.push_back(base * 10 + digits[i]);
      }
    } else {
      for (std::size_t slot = 0; slot < kListLength; ++slot) {
        std::int64_t value = 0;
        bool placed = false;
        for (int attempt = 0; attempt <= kMaxRedraws && !placed; ++attempt) {
          std::int64_t integer = pool[nearest_index(pool, static_cast<double>(base) + sigma * rng.normal())];
          value = integer * 10 + static_cast<std::int64_t>(rng.below(10));
          placed = std::find(values.begin(), values.end(), value) == values.end();
        }
        // At most four decimals of any integer part are taken, so one is free.
        for (std::int64_t d = 0; !placed && d < 10; ++d) {
          value = (value / 10) * 10 + d;
          placed = std::find(values.begin(), values.end(), value) == values.end();
        }
        values.push_back(value);
      }
      rng.shuffle(std::span<std::int64_t>(values));
    }
    ListMaxInstance inst;
    for (std::size_t slot = 0; slot < kListLength; ++slot)
      inst.tokens[slot] = NumberToken(values[slot], NumberFormat::Float1);
    inst.label = argmax_label(inst.tokens);
    out.push_back(std::move(inst));
  }
  return out;
}

bool shares_integer_part(const ListMaxInstance& instance) {
  const auto first = instance.tokens[0].units() / 10;
  return std::all_of(instance.tokens.begin(), instance.tokens.end(),
                     [&](const NumberToken& t) { return t.units() / 10 == first; });
}

void ExtrapolationSpec::validate() const {
  if (train_range.size() <= 0) throw ConfigError("extrapolation train range is empty");
  for (const auto& r : test_ranges) {
    if (r.size() <= 0) throw ConfigError("extrapolation test range is empty");
    if (r.overlaps(train_range))
      throw ConfigError("extrapolation test range [" + std::to_string(r.lo) + "," +
                        std::to_string(r.hi) + "] overlaps the training range");
  }
}

void write_tsv(std::ostream& out, std::span<const ListMaxInstance> data) {
  for (const auto& inst : data) {
    for (const auto& t : inst.tokens) out << t.surface() << '\t';
    out << inst.label << '\n';
  }
}

void write_tsv(std::ostream& out, std::span<const DecodeInstance> data) {
  for (const auto& inst : data) out << inst.token.surface() << '\t' << inst.target << '\n';
}

void write_tsv(std::ostream& out, std::span<const AddInstance> data) {
  for (const auto& inst : data)
    out << inst.a.surface() << '\t' << inst.b.surface() << '\t' << inst.target << '\n';
}

}  // namespace numeracy::taskgen
