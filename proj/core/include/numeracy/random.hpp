#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace numeracy {

/// Seeded pseudo-random source with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Every distribution is implemented here rather than taken from
/// <random>, because the standard distributions are implementation-defined.
///  - uniform01: top 53 bits of one draw, scaled to [0, 1).
///  - below(n): rejection sampling on the top of the 64-bit range.
///  - normal: Box-Muller, both outputs used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  bool bernoulli(double p) { return uniform01() < p; }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from an ordered list of parts.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// 64-bit FNV-1a hash of a string; stable across platforms.
std::uint64_t fnv1a(std::string_view text);

}  // namespace numeracy
