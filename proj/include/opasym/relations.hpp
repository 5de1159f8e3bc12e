#pragma once

// Both sides of the uncertainty relations built on asymmetry norms, plus the
// Robertson baseline and the historical (invalid) skew-information product
// relation. Every evaluator returns a BoundReport with lhs >= rhs expected.

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "opasym/commutant.hpp"
#include "opasym/linalg.hpp"

namespace opasym {

enum class Relation { robertson, thm1, cor1, thm2, cor2, luo_historical, holder_step };

std::string_view to_string(Relation r) noexcept;
/// Accepts the names printed by to_string plus "luo".
std::optional<Relation> parse_relation(std::string_view name) noexcept;

/// Hoelder-conjugate exponents, 1/p + 1/q = 1.
class ConjugatePair {
 public:
  explicit ConjugatePair(Exponent p) : p_(p), q_(p.conjugate()) {}
  /// Throws invalid_exponent unless 1/p + 1/q = 1 within 1e-12.
  ConjugatePair(Exponent p, Exponent q);

  Exponent p() const noexcept { return p_; }
  Exponent q() const noexcept { return q_; }

 private:
  Exponent p_;
  Exponent q_;
};

inline constexpr double kReportTol = 1e-9;
// Asymmetry norms at or below this are treated as zero (commuting pair).
inline constexpr double kDegenerateNormTol = 1e-12;

struct ReportMeta {
  Index dim = 0;
  std::optional<Exponent> p, q, r, s;
  std::optional<std::uint64_t> seed;
  bool degenerate = false;  // DegenerateBound: a vanishing asymmetry norm
  std::optional<double> norm_b_given_a;
  std::optional<double> norm_a_given_b;
};

struct BoundReport {
  Relation relation = Relation::robertson;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  bool satisfied = true;
  std::optional<double> refinement;
  ReportMeta meta;
};

struct RelationOptions {
  SolverOptions solver;
  double report_tol = kReportTol;
};

/// <A^2> - <A>^2, evaluated as ||(A - <A>) psi||^2 to avoid cancellation.
double variance(const PureState& psi, const Observable& a);
double variance(const DensityMatrix& rho, const Observable& a);

/// Wigner-Yanase skew information, (1/2) ||[sqrt(rho), A]||_2^2.
double wysi(const DensityMatrix& rho, const Observable& a);

BoundReport robertson(const PureState& psi, const Observable& a, const Observable& b,
                      const RelationOptions& opts = {});
BoundReport robertson(const DensityMatrix& rho, const Observable& a, const Observable& b,
                      const RelationOptions& opts = {});

/// |Tr(rho C)| <= ||B - A_d||_p ||[rho, A]||_q for a given A_d in C(A).
/// Throws not_in_commutant when ||[A, A_d]||_inf > 1e-8 ||A||_inf ||A_d||_inf.
BoundReport holder_step_check(const DensityMatrix& rho, const Observable& a, const Observable& b,
                              const ComplexMatrix& a_d, ConjugatePair pq,
                              const RelationOptions& opts = {});

/// ||[rho,A]||_q ||[rho,B]||_s >= |Tr(rho C)|^2 / (N_p(B|A) N_r(A|B)).
BoundReport thm1(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts = {});

/// Pure-state variance form; `refinement` carries
/// R = 2^(1 - 1/q - 1/s) |<C>| / (N_p(B|A) N_r(A|B)).
BoundReport cor1(const PureState& psi, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts = {});

/// (||[|psi><psi|, A]||_q, 2^(1/q) Delta A); equal in exact arithmetic.
std::pair<double, double> pure_commutator_norm_identity(const PureState& psi, const Observable& a,
                                                        Exponent q);

/// thm1 with rho replaced by sqrt(rho) in the commutators and the trace.
BoundReport thm2(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts = {});

/// sqrt(I(rho,A) I(rho,B)) >= (1/2)|Tr(sqrt(rho) C)| R~ with
/// R~ = |Tr(sqrt(rho) C)| / (N_2(B|A) N_2(A|B)).
BoundReport cor2(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 const RelationOptions& opts = {});

/// sqrt(I(rho,A) I(rho,B)) >= (1/2)|Tr(rho C)|. Not a valid inequality in
/// general; violations are reported, never thrown.
BoundReport luo_historical(const DensityMatrix& rho, const Observable& a, const Observable& b,
                           const RelationOptions& opts = {});

}  // namespace opasym
