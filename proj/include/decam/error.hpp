#pragma once

#include <stdexcept>
#include <string>

namespace decam {

enum class ErrorKind {
  kDimensionMismatch,
  kInvalidGeometry,
  kInvalidArgument,
  kScorerUnavailable,
  kShapeMismatch,
  kNonFiniteOutput,
  kDegenerateOracle,
  kDegenerateSaliency,
  kEmptyPopulation,
  kFormat,
  kIo,
};

const char* to_string(ErrorKind kind);

// Every failure in the engine surfaces as this exception; `kind()` lets
// drivers map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace decam
