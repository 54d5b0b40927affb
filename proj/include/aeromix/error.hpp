#pragma once

#include <stdexcept>
#include <string>

namespace aeromix {

// Coarse error classes. The CLI maps these to exit codes and prints the
// class tag in machine-parsable form.
enum class ErrorClass {
  ConfigInvalid,
  InputMissing,
  InputInvalid,
  ParseError,
  ValidationError,
  InsufficientData,
  DegenerateGeometry,
  NumericError,
  PipelineError,
  IoError,
  Internal,
};

const char* to_string(ErrorClass c);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass klass, const std::string& message);
  ErrorClass klass() const { return klass_; }

 private:
  ErrorClass klass_;
};

[[noreturn]] void fail(ErrorClass klass, const std::string& message);

}  // namespace aeromix
