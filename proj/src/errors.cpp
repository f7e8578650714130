#include "bracketlab/errors.hpp"

namespace bracketlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::DomainWarning: return "DomainWarning";
    case ErrorKind::PrecisionCapExceeded: return "PrecisionCapExceeded";
    case ErrorKind::FloorUndecidable: return "FloorUndecidable";
    case ErrorKind::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorKind::SignChange: return "SignChange";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::CodingGap: return "CodingGap";
    case ErrorKind::HTooLarge: return "HTooLarge";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::LimitExceeded: return "LimitExceeded";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& module, const std::string& operation,
                           const std::string& detail) {
  return std::string(to_string(kind)) + " in " + module + "::" + operation + ": " + detail;
}

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, std::string module, std::string operation, const std::string& detail)
    : std::runtime_error(format_message(kind, module, operation, detail)),
      kind_(kind),
      module_(std::move(module)),
      operation_(std::move(operation)) {}

bool Error::is_cap_violation() const noexcept {
  switch (kind_) {
    case ErrorKind::PrecisionCapExceeded:
    case ErrorKind::OrderCapExceeded:
    case ErrorKind::LimitExceeded:
    case ErrorKind::HTooLarge:
    case ErrorKind::BudgetTooSmall:
      return true;
    default:
      return false;
  }
}

ParseError::ParseError(std::string module, std::string operation, std::size_t offset,
                       std::vector<std::string> expected, const std::string& detail)
    : Error(ErrorKind::Parse, std::move(module), std::move(operation),
            detail + " at byte " + std::to_string(offset) +
                (expected.empty() ? std::string() : " (expected one of: " + join_expected(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace bracketlab
