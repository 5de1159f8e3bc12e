#pragma once

// Unitary evolution under a time-independent Hamiltonian and the two speed
// limits on |d<A>/dt|: Mandelstam-Tamm, v <= 2 dA dH, and the asymmetry-norm
// form, v^2 <= 2 dA dH N_2(A|H) N_2(H|A). Units with hbar = 1.

#include <cstdint>
#include <vector>

#include "opasym/commutant.hpp"
#include "opasym/linalg.hpp"

namespace opasym {

/// exp(-iHt) through the spectral decomposition of H, computed once.
class Propagator {
 public:
  explicit Propagator(const Observable& h);

  PureState operator()(const PureState& psi0, double t) const;
  const EigenDecomposition& spectrum() const noexcept { return spectrum_; }

 private:
  EigenDecomposition spectrum_;
};

PureState propagate(const Observable& h, const PureState& psi0, double t);

/// d<A>/dt = i <[H, A]>.
double signed_velocity(const PureState& psi, const Observable& h, const Observable& a);
/// v_A = |<[H, A]>|.
double velocity(const PureState& psi, const Observable& h, const Observable& a);

double mt_bound(const PureState& psi, const Observable& h, const Observable& a);

/// State-independent factors of the asymmetry-norm speed limit.
struct QslNorms {
  double a_given_h = 0.0;  // N_2(A|H)
  double h_given_a = 0.0;  // N_2(H|A)
};

QslNorms qsl_norms(const Observable& h, const Observable& a, const SolverOptions& opts = {});

/// sqrt(2 dA dH N_2(A|H) N_2(H|A)).
double aur_qsl_bound(const PureState& psi, const Observable& h, const Observable& a,
                     const QslNorms& norms);
double aur_qsl_bound(const PureState& psi, const Observable& h, const Observable& a,
                     const SolverOptions& opts = {});

/// A = A_diag + epsilon V with [H, A_diag] = 0 and V off-diagonal in the
/// eigenbasis of H, ||V||_inf = 1.
struct NearlyConservedSpec {
  Observable h;
  double epsilon;
  Observable a_diag;
  Observable v;
  Observable a;
};

/// Draws A_diag uniform in [-1, 1] on H's eigenbasis and V from a Gaussian
/// Hermitian ensemble with the diagonal (in that basis) removed. Throws
/// degenerate_hamiltonian if two eigenvalues of H are closer than the
/// default clustering tolerance.
NearlyConservedSpec make_nearly_conserved(const Observable& h, double epsilon, std::uint64_t seed);

/// Same, with H drawn from the Gaussian Hermitian ensemble; redraws H up to
/// max_retries times before giving up with degenerate_hamiltonian.
NearlyConservedSpec random_nearly_conserved(Index dim, double epsilon, std::uint64_t seed,
                                            int max_retries = 16);

struct Trajectory {
  std::vector<double> times;
  std::vector<PureState> states;
  std::vector<double> expectation_a;
  std::vector<double> velocity;
  std::vector<double> mt_bound;
  std::vector<double> aur_bound;
  QslNorms norms;
};

/// Uniform grid t_i = i t_max / (n_steps - 1). Throws invariant_violation if
/// either speed limit fails at any point by more than 1e-9.
Trajectory run_trajectory(const Observable& h, const Observable& a, const PureState& psi0,
                          double t_max, int n_steps, const SolverOptions& opts = {});

}  // namespace opasym
