#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlai {

enum class ErrorKind {
  domain,
  invalid_argument,
  classical_has_no_fock_expansion,
  classical_has_no_photon_number,
  truncation_too_small,
  window_too_small,
  lattice_overflow,
  harmonic_residual,
  offset_mismatch,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::classical_has_no_fock_expansion: return "ClassicalHasNoFockExpansion";
    case ErrorKind::classical_has_no_photon_number: return "ClassicalHasNoPhotonNumber";
    case ErrorKind::truncation_too_small: return "TruncationTooSmall";
    case ErrorKind::window_too_small: return "WindowTooSmall";
    case ErrorKind::lattice_overflow: return "LatticeOverflow";
    case ErrorKind::harmonic_residual: return "HarmonicResidual";
    case ErrorKind::offset_mismatch: return "OffsetMismatch";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Validation problems are the caller's fault; everything else is numeric.
  bool is_validation() const noexcept {
    return kind_ == ErrorKind::domain || kind_ == ErrorKind::invalid_argument ||
           kind_ == ErrorKind::classical_has_no_fock_expansion ||
           kind_ == ErrorKind::classical_has_no_photon_number;
  }

 private:
  ErrorKind kind_;
};

}  // namespace qlai
