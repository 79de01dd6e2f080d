#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace avlab {

enum class ErrorKind {
  StepFailure,
  OutOfDomain,
  NotClosed,
  NearCritical,
  DegenerateCritical,
  TopologyAmbiguous,
  ExtrapolationUnstable,
  NonzeroAtExtremum,
  WindowTooNarrow,
  CoefficientRangeExceeded,
  BindingPoint,
  RadialCollapse,
  PSDViolation,
  EmptyLaw,
  InvalidArgument,
  ParseError,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so that
/// simulators can flag paths by cause and the CLI can print structured
/// diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::NearCritical: return "NearCritical";
    case ErrorKind::DegenerateCritical: return "DegenerateCritical";
    case ErrorKind::TopologyAmbiguous: return "TopologyAmbiguous";
    case ErrorKind::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorKind::NonzeroAtExtremum: return "NonzeroAtExtremum";
    case ErrorKind::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorKind::CoefficientRangeExceeded: return "CoefficientRangeExceeded";
    case ErrorKind::BindingPoint: return "BindingPoint";
    case ErrorKind::RadialCollapse: return "RadialCollapse";
    case ErrorKind::PSDViolation: return "PSDViolation";
    case ErrorKind::EmptyLaw: return "EmptyLaw";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace avlab
