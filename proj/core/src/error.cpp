#include "parisi/error.hpp"

namespace parisi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::EmptyMixture: return "EmptyMixture";
    case ErrorCode::KeyBelowTwo: return "KeyBelowTwo";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::CapacityError: return "CapacityError";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::QuadratureUnderflow: return "QuadratureUnderflow";
    case ErrorCode::LevelCapExceeded: return "LevelCapExceeded";
    case ErrorCode::MissingGammaSample: return "MissingGammaSample";
    case ErrorCode::MassLeak: return "MassLeak";
    case ErrorCode::DegenerateTail: return "DegenerateTail";
    case ErrorCode::SingularMixture: return "SingularMixture";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace parisi
