// SPDX-License-Identifier: Apache-2.0

#include "maxkron/error.hpp"

namespace maxkron
{

std::string_view to_string(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::InvalidArgument:
      return "invalid-argument";
    case ErrorCode::Domain:
      return "domain-error";
    case ErrorCode::UnsupportedDegree:
      return "unsupported-degree";
    case ErrorCode::PairingDimension:
      return "pairing-dimension";
    case ErrorCode::IncompatibleComplex:
      return "incompatible-complex";
    case ErrorCode::SingularMatrix:
      return "singular-matrix";
    case ErrorCode::State:
      return "state-error";
    case ErrorCode::InvalidGeometry:
      return "invalid-geometry";
    case ErrorCode::DegenerateGeometry:
      return "degenerate-geometry";
    case ErrorCode::InvalidMaterial:
      return "invalid-material";
    case ErrorCode::Unsupported:
      return "unsupported";
    case ErrorCode::Factorization:
      return "factorization-failure";
    case ErrorCode::UnstableIntegration:
      return "unstable-integration";
    case ErrorCode::Parse:
      return "parse-error";
    case ErrorCode::Validation:
      return "validation-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string &message)
  : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

void fail(ErrorCode code, const std::string &message)
{
  throw Error(code, message);
}

}  // namespace maxkron
