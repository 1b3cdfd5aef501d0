#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "numeracy/numeral.hpp"

namespace numeracy::taskgen {

using numeral::NumberFormat;
using numeral::NumberToken;

inline constexpr std::size_t kListLength = 5;
inline constexpr std::size_t kDefaultTrainLists = 100'000;
inline constexpr std::size_t kDefaultTestLists = 10'000;
inline constexpr double kDefaultVarianceFactor = 0.01;
inline constexpr double kDefaultTrainFraction = 0.8;

/// Inclusive integer range.
struct Range {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  std::int64_t size() const { return hi - lo + 1; }
  bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
  bool overlaps(const Range& o) const { return lo <= o.hi && o.lo <= hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// 80/20 partition of an integer range. Both pools are kept sorted.
struct PoolSplit {
  Range range;
  std::vector<std::int64_t> train_pool;
  std::vector<std::int64_t> test_pool;
  std::uint64_t seed = 0;
  /// Set when one side is empty (e.g. a single-value range).
  bool degenerate = false;
};

PoolSplit make_split(Range range, std::uint64_t seed,
                     double train_fraction = kDefaultTrainFraction);

struct ListMaxInstance {
  std::array<NumberToken, kListLength> tokens;
  int label = 0;
};

struct DecodeInstance {
  NumberToken token;
  double target = 0.0;
};

struct AddInstance {
  NumberToken a;
  NumberToken b;
  double target = 0.0;
};

/// Index of the largest value; first index on ties.
int argmax_label(const std::array<NumberToken, kListLength>& tokens);

struct ListMaxOptions {
  std::size_t count = kDefaultTrainLists;
  /// Size of the full experiment range; the Gaussian offset variance is
  /// variance_factor * range_size.
  std::int64_t range_size = 100;
  double variance_factor = kDefaultVarianceFactor;
  NumberFormat format = NumberFormat::Digits;
  std::uint64_t seed = 0;
};

/// Lists of five nearby, pairwise-distinct pool values.
///
/// Each list picks a base uniformly from the pool, then for every slot adds
/// a zero-mean Gaussian offset and snaps to the nearest pool value (ties go
/// to the smaller value). A slot whose value is already taken redraws its
/// offset; after kMaxRedraws failed redraws it takes the unused pool value
/// nearest to the last candidate, so generation always terminates.
/// The five values are then put in uniformly random order, since later
/// slots would otherwise be biased towards the extremes.
///
/// Throws PoolTooSmall if the pool has fewer than five distinct values.
std::vector<ListMaxInstance> gen_listmax(std::span<const std::int64_t> pool,
                                         const ListMaxOptions& options);

inline constexpr int kMaxRedraws = 64;

/// One instance per pool value, in pool order.
std::vector<DecodeInstance> gen_decode(std::span<const std::int64_t> pool, NumberFormat format);

/// All ordered pairs of pool values. When subsample_fraction < 1 exactly
/// round(fraction * n^2) pairs are kept, chosen uniformly without
/// replacement and emitted in enumeration order.
std::vector<AddInstance> gen_add(std::span<const std::int64_t> pool, NumberFormat format,
                                 double subsample_fraction, std::uint64_t seed);

/// Fraction of addition pairs to keep for a range: 1 for ranges of at
/// most `threshold` values, `fraction` beyond that.
double add_subsample_fraction(std::int64_t range_size, std::int64_t threshold = 100,
                              double fraction = 0.1);

struct FloatListOptions {
  std::size_t count = kDefaultTrainLists;
  /// Size of the integer-part range.
  std::int64_t range_size = 100;
  double variance_factor = kDefaultVarianceFactor;
  /// Probability that a list repeats one integer part with distinct decimals.
  double shared_fraction = 0.5;
  std::uint64_t seed = 0;
};

/// Float1 list-max lists over a pool of integer parts. Half the lists (in
/// expectation) share one integer part with five distinct decimal digits;
/// the rest use nearby integer parts, each with a random decimal digit.
std::vector<ListMaxInstance> gen_listmax_float(std::span<const std::int64_t> integer_pool,
                                               const FloatListOptions& options);

/// True when every value of the list shares one integer part.
bool shares_integer_part(const ListMaxInstance& instance);

/// Training on one range and testing on disjoint ranges.
struct ExtrapolationSpec {
  Range train_range;
  std::vector<Range> test_ranges;

  /// Throws ConfigError if any test range overlaps the training range.
  void validate() const;
};

// Tab-separated dumps: surfaces, then the label or target.
void write_tsv(std::ostream& out, std::span<const ListMaxInstance> data);
void write_tsv(std::ostream& out, std::span<const DecodeInstance> data);
void write_tsv(std::ostream& out, std::span<const AddInstance> data);

}  // namespace numeracy::taskgen
