#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace numeracy::numeral {

/// Surface forms a number can take.
///  Digits          "75"            integers >= 0
///  Words           "seventy-five"  integers 0..99
///  Float1          "75.1"          nonnegative, exactly one decimal digit
///  NegativeDigits  "-75"           any integer
enum class NumberFormat { Digits, Words, Float1, NegativeDigits };

std::string_view to_string(NumberFormat format);
/// Accepts "digits", "words", "float1", "negative".
NumberFormat format_from_string(std::string_view name);

/// Values are carried as exact integers in the format's unit: tenths for
/// Float1, ones otherwise. `units_per_one` converts between the two.
constexpr std::int64_t units_per_one(NumberFormat format) {
  return format == NumberFormat::Float1 ? 10 : 1;
}

bool representable(std::int64_t units, NumberFormat format);

/// Throws FormatRangeError when `units` is outside the format's domain.
std::string render(std::int64_t units, NumberFormat format);

/// Inverse of render. Only canonical renderings are accepted; anything
/// else throws ParseError.
std::int64_t parse(std::string_view surface, NumberFormat format);

/// A value together with its canonical surface string.
class NumberToken {
 public:
  NumberToken() : NumberToken(0, NumberFormat::Digits) {}
  NumberToken(std::int64_t units, NumberFormat format)
      : units_(units), format_(format), surface_(render(units, format)) {}

  std::int64_t units() const noexcept { return units_; }
  double value() const noexcept {
    return static_cast<double>(units_) / static_cast<double>(units_per_one(format_));
  }
  NumberFormat format() const noexcept { return format_; }
  const std::string& surface() const noexcept { return surface_; }

  friend bool operator==(const NumberToken& a, const NumberToken& b) {
    return a.units_ == b.units_ && a.format_ == b.format_;
  }

 private:
  std::int64_t units_;
  NumberFormat format_;
  std::string surface_;
};

}  // namespace numeracy::numeral
