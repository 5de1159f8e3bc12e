#include "opasym/error.hpp"

namespace opasym {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::not_hermitian: return "NotHermitian";
    case Errc::not_psd: return "NotPSD";
    case Errc::not_normalized: return "NotNormalized";
    case Errc::not_pure: return "NotPure";
    case Errc::not_finite: return "NotFinite";
    case Errc::not_square: return "NotSquare";
    case Errc::invalid_exponent: return "InvalidExponent";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::dimension_too_large: return "DimensionTooLarge";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::not_in_commutant: return "NotInCommutant";
    case Errc::degenerate_hamiltonian: return "DegenerateHamiltonian";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::numerical: return "NumericalError";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IOError";
  }
  return "Unknown";
}

}  // namespace opasym
