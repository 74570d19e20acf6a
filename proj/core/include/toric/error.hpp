#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toric {

enum class ErrorCode {
  InvalidInput,
  ZeroNormal,
  EmptyInterior,
  NotPointed,
  NotUnimodular,
  NotDelzant,
  InvalidFan,
  DomainViolation,
  NotConverged,
  NoTailBound,
  NonIntegrable,
  NonIntegrablePotential,
  NotConvex,
  ZeroNotInterior,
  HessianNotSPD,
  InsufficientMeshResolution,
  InvalidParams,
  PathLeavesCone,
  ConvexityLost,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every module reports failures through this one exception type so that the
// CLI can map them onto machine-readable {"error": code, "detail": ...}.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace toric
