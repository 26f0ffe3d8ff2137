#pragma once

#include <stdexcept>
#include <string>

namespace plectic {

enum class ErrorKind {
  InsufficientPrecision,
  NotASquare,
  InvalidPeriod,
  EmbeddingUnavailable,
  PrimeNotInert,
  SchemaError,
  RadialContractViolation,
  DepthExceeded,
  OracleIncomplete,
  DegenerationUnderdetermined,
  LiftInconsistent,
  NotMultiplicative,
  EmbeddingNotInert,
  OutOfDepth,
  InvalidArgument,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }
  const char* name() const { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace plectic
