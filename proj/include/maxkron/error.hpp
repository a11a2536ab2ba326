// SPDX-License-Identifier: Apache-2.0

#ifndef MAXKRON_ERROR_HPP
#define MAXKRON_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxkron
{

enum class ErrorCode
{
  InvalidArgument,
  Domain,
  UnsupportedDegree,
  PairingDimension,
  IncompatibleComplex,
  SingularMatrix,
  State,
  InvalidGeometry,
  DegenerateGeometry,
  InvalidMaterial,
  Unsupported,
  Factorization,
  UnstableIntegration,
  Parse,
  Validation,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception; the code identifies the
// failure class, the message carries the details.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string &message);

inline void require(bool condition, ErrorCode code, const std::string &message)
{
  if (!condition)
  {
    fail(code, message);
  }
}

}  // namespace maxkron

#endif  // MAXKRON_ERROR_HPP
