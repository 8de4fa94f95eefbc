#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhsta {

enum class ErrorKind {
  DegenerateSpectrum,
  NonFinite,
  IndexOutOfRange,
  DegenerateRegime,
  BranchJump,
  TanPole,
  SinThetaSingular,
  ZeroGauge,
  InconsistentChoice,
  PolicyMismatch,
  GridMismatch,
  InvalidArgument,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateRegime: return "DegenerateRegime";
    case ErrorKind::BranchJump: return "BranchJump";
    case ErrorKind::TanPole: return "TanPole";
    case ErrorKind::SinThetaSingular: return "SinThetaSingular";
    case ErrorKind::ZeroGauge: return "ZeroGauge";
    case ErrorKind::InconsistentChoice: return "InconsistentChoice";
    case ErrorKind::PolicyMismatch: return "PolicyMismatch";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for the kinds the CLI reports as numerical failures (exit status 3).
constexpr bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSpectrum:
    case ErrorKind::NonFinite:
    case ErrorKind::DegenerateRegime:
    case ErrorKind::BranchJump:
    case ErrorKind::TanPole:
    case ErrorKind::SinThetaSingular:
    case ErrorKind::ZeroGauge:
      return true;
    default:
      return false;
  }
}

}  // namespace nhsta
