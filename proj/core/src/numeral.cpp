#include "numeracy/numeral.hpp"

#include <array>
#include <charconv>
#include <limits>

#include "numeracy/errors.hpp"

namespace numeracy::numeral {
namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};

constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

std::string words(std::int64_t v) {
  if (v < 20) return std::string(kOnes[static_cast<std::size_t>(v)]);
  std::string out(kTens[static_cast<std::size_t>(v / 10)]);
  if (v % 10 != 0) {
    out += '-';
    out += kOnes[static_cast<std::size_t>(v % 10)];
  }
  return out;
}

[[noreturn]] void parse_fail(std::string_view surface, NumberFormat format) {
  throw ParseError("cannot parse '" + std::string(surface) + "' as " +
                   std::string(to_string(format)));
}

// Unsigned canonical decimal: no sign, no leading zeros (except "0").
bool parse_unsigned(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  if (s.size() > 1 && s.front() == '0') return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(NumberFormat format) {
  switch (format) {
    case NumberFormat::Digits: return "digits";
    case NumberFormat::Words: return "words";
    case NumberFormat::Float1: return "float1";
    case NumberFormat::NegativeDigits: return "negative";
  }
  return "unknown";
}

NumberFormat format_from_string(std::string_view name) {
  if (name == "digits") return NumberFormat::Digits;
  if (name == "words") return NumberFormat::Words;
  if (name == "float1" || name == "float") return NumberFormat::Float1;
  if (name == "negative" || name == "negative_digits") return NumberFormat::NegativeDigits;
  throw ParseError("unknown number format '" + std::string(name) + "'");
}

bool representable(std::int64_t units, NumberFormat format) {
  switch (format) {
    case NumberFormat::Digits:
    case NumberFormat::Float1: return units >= 0;
    case NumberFormat::Words: return units >= 0 && units <= 99;
    case NumberFormat::NegativeDigits: return units != std::numeric_limits<std::int64_t>::min();
  }
  return false;
}

std::string render(std::int64_t units, NumberFormat format) {
  if (!representable(units, format)) {
    throw FormatRangeError("value " + std::to_string(units) + " not representable as " +
                           std::string(to_string(format)));
  }
  switch (format) {
    case NumberFormat::Digits:
    case NumberFormat::NegativeDigits: return std::to_string(units);
    case NumberFormat::Words: return words(units);
    case NumberFormat::Float1:
      return std::to_string(units / 10) + '.' + static_cast<char>('0' + units % 10);
  }
  return {};
}

std::int64_t parse(std::string_view surface, NumberFormat format) {
  std::int64_t v = 0;
  switch (format) {
    case NumberFormat::Digits:
      if (!parse_unsigned(surface, v)) parse_fail(surface, format);
      return v;
    case NumberFormat::NegativeDigits: {
      bool negative = !surface.empty() && surface.front() == '-';
      std::string_view body = negative ? surface.substr(1) : surface;
      if (!parse_unsigned(body, v)) parse_fail(surface, format);
      if (negative && v == 0) parse_fail(surface, format);  // "-0"
      return negative ? -v : v;
    }
    case NumberFormat::Float1: {
      if (surface.size() < 3 || surface[surface.size() - 2] != '.') parse_fail(surface, format);
      char frac = surface.back();
      if (frac < '0' || frac > '9') parse_fail(surface, format);
      if (!parse_unsigned(surface.substr(0, surface.size() - 2), v)) parse_fail(surface, format);
      if (v > std::numeric_limits<std::int64_t>::max() / 10 - 1) parse_fail(surface, format);
      return v * 10 + (frac - '0');
    }
    case NumberFormat::Words:
      for (std::int64_t candidate = 0; candidate <= 99; ++candidate)
        if (words(candidate) == surface) return candidate;
      parse_fail(surface, format);
  }
  parse_fail(surface, format);
}

}  // namespace numeracy::numeral
