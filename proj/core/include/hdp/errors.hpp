#pragma once

#include <stdexcept>
#include <string>

namespace hdp {

// Base class for every error raised by the library. The category maps onto
// the CLI exit codes (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
 public:
  enum class Category { kConfig, kData, kNumeric, kContract };

  Error(Category category, const std::string& what);

  Category category() const noexcept { return category_; }
  const char* category_name() const noexcept;

 private:
  Category category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::kConfig, what) {}
};

// Missing files, malformed rows, labels out of range and similar input problems.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(Category::kNumeric, what) {}
};

// Shape mismatches and misuse of the recording tape.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(Category::kContract, what) {}
};

class DimensionError : public ContractViolation {
 public:
  explicit DimensionError(const std::string& what) : ContractViolation(what) {}
};

}  // namespace hdp
