#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opasym {

enum class Errc {
  not_hermitian,
  not_psd,
  not_normalized,
  not_pure,
  not_finite,
  not_square,
  invalid_exponent,
  dimension_mismatch,
  dimension_too_large,
  no_convergence,
  not_in_commutant,
  degenerate_hamiltonian,
  invalid_spec,
  invariant_violation,
  numerical,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// front ends (CLI, Python) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace opasym
