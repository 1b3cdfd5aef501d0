#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace numeracy {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// numeral
class FormatRangeError : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };

// taskgen
class PoolTooSmall : public Error { using Error::Error; };

// embed
class BadVectorFile : public Error { using Error::Error; };
class DimMismatch : public Error { using Error::Error; };
class UnknownChar : public Error { using Error::Error; };

class CoverageError : public Error {
 public:
  explicit CoverageError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// neural / probe
class NonFiniteLoss : public Error { using Error::Error; };

// runner
class ConfigError : public Error { using Error::Error; };

}  // namespace numeracy
