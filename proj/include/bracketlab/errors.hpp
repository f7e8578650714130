// Error types shared by every module. Each error names the module and the
// operation that raised it so the CLI can print an actionable message.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bracketlab {

enum class ErrorKind {
  Parse,
  Domain,
  DomainWarning,
  PrecisionCapExceeded,
  FloorUndecidable,
  OrderCapExceeded,
  SignChange,
  EmptyInput,
  BudgetTooSmall,
  ZeroPolynomial,
  CodingGap,
  HTooLarge,
  DegenerateCurve,
  TooShort,
  LimitExceeded,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string operation, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

  /// True for the errors the CLI reports as cap violations (exit code 4).
  bool is_cap_violation() const noexcept;

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
};

class ParseError : public Error {
 public:
  ParseError(std::string module, std::string operation, std::size_t offset,
             std::vector<std::string> expected, const std::string& detail);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace bracketlab
