#include "aeromix/error.hpp"

namespace aeromix {

const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::ConfigInvalid: return "config-invalid";
    case ErrorClass::InputMissing: return "input-missing";
    case ErrorClass::InputInvalid: return "input-invalid";
    case ErrorClass::ParseError: return "parse-error";
    case ErrorClass::ValidationError: return "validation-error";
    case ErrorClass::InsufficientData: return "insufficient-data";
    case ErrorClass::DegenerateGeometry: return "degenerate-geometry";
    case ErrorClass::NumericError: return "numeric-error";
    case ErrorClass::PipelineError: return "pipeline-error";
    case ErrorClass::IoError: return "io-error";
    case ErrorClass::Internal: return "internal-error";
  }
  return "internal-error";
}

Error::Error(ErrorClass klass, const std::string& message)
    : std::runtime_error(message), klass_(klass) {}

void fail(ErrorClass klass, const std::string& message) {
  throw Error(klass, message);
}

}  // namespace aeromix
