#include "opasym/dynamics.hpp"

#include <cmath>

#include "opasym/random.hpp"
#include "opasym/relations.hpp"

namespace opasym {

namespace {

constexpr double kQslTol = 1e-9;

double std_dev(const PureState& psi, const Observable& a) { return std::sqrt(variance(psi, a)); }

}  // namespace

Propagator::Propagator(const Observable& h) : spectrum_(eig_hermitian(h)) {}

PureState Propagator::operator()(const PureState& psi0, double t) const {
  require_same_dim(psi0.dim(), spectrum_.eigenvalues.size(), "propagate");
  if (t == 0.0) return psi0;
  const ComplexMatrix& v = spectrum_.eigenvectors;
  ComplexVector c = v.adjoint() * psi0.amplitudes();
  for (Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -spectrum_.eigenvalues(k) * t);
  // Renormalise away the O(eps) drift of the eigenvector matrix.
  return PureState::normalized(v * c);
}

PureState propagate(const Observable& h, const PureState& psi0, double t) {
  return Propagator(h)(psi0, t);
}

double signed_velocity(const PureState& psi, const Observable& h, const Observable& a) {
  require_same_dim(h.dim(), a.dim(), "velocity");
  require_same_dim(psi.dim(), h.dim(), "velocity");
  // i[H, A] = -i[A, H] = commutator_c(A, H); expectation() enforces realness.
  return expectation(psi, commutator_c(a, h));
}

double velocity(const PureState& psi, const Observable& h, const Observable& a) {
  return std::abs(signed_velocity(psi, h, a));
}

double mt_bound(const PureState& psi, const Observable& h, const Observable& a) {
  require_same_dim(h.dim(), a.dim(), "mt_bound");
  return 2.0 * std_dev(psi, a) * std_dev(psi, h);
}

QslNorms qsl_norms(const Observable& h, const Observable& a, const SolverOptions& opts) {
  require_same_dim(h.dim(), a.dim(), "qsl_norms");
  QslNorms n;
  n.a_given_h = asymmetry_norm(a, h, 2.0, opts).value;
  n.h_given_a = asymmetry_norm(h, a, 2.0, opts).value;
  return n;
}

double aur_qsl_bound(const PureState& psi, const Observable& h, const Observable& a,
                     const QslNorms& norms) {
  require_same_dim(h.dim(), a.dim(), "aur_qsl_bound");
  return std::sqrt(2.0 * std_dev(psi, a) * std_dev(psi, h) * norms.a_given_h * norms.h_given_a);
}

double aur_qsl_bound(const PureState& psi, const Observable& h, const Observable& a,
                     const SolverOptions& opts) {
  return aur_qsl_bound(psi, h, a, qsl_norms(h, a, opts));
}

NearlyConservedSpec make_nearly_conserved(const Observable& h, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(Errc::invalid_spec, "epsilon must be finite and >= 0");
  }
  const EigenDecomposition e = eig_hermitian(h);
  const Index d = h.dim();
  const double gap_tol = default_cluster_tol(e.eigenvalues);
  for (Index k = 1; k < d; ++k) {
    if (e.eigenvalues(k) - e.eigenvalues(k - 1) <= gap_tol) {
      throw Error(Errc::degenerate_hamiltonian, "eigenvalue gap below " + std::to_string(gap_tol));
    }
  }

  Rng rng(seed);
  RealVector diag(d);
  for (Index k = 0; k < d; ++k) diag(k) = rng.uniform(-1.0, 1.0);
  const ComplexMatrix g = rng.complex_gaussian(d, d);
  ComplexMatrix v_local = 0.5 * (g + g.adjoint());
  v_local.diagonal().setZero();
  const double v_norm = schatten_norm(v_local, Exponent::infinity());
  if (v_norm > 0.0) v_local /= v_norm;

  const ComplexMatrix& u = e.eigenvectors;
  Observable a_diag = Observable::symmetrized(u * diag.cast<Complex>().asDiagonal() * u.adjoint());
  Observable v = Observable::symmetrized(u * v_local * u.adjoint());
  Observable a = Observable::symmetrized(a_diag.matrix() + epsilon * v.matrix());
  return NearlyConservedSpec{h, epsilon, std::move(a_diag), std::move(v), std::move(a)};
}

NearlyConservedSpec random_nearly_conserved(Index dim, double epsilon, std::uint64_t seed,
                                            int max_retries) {
  Rng rng(seed);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const ComplexMatrix g = rng.complex_gaussian(dim, dim);
    const Observable h = Observable::symmetrized(0.5 * (g + g.adjoint()));
    try {
      return make_nearly_conserved(h, epsilon, rng.next_u64());
    } catch (const Error& err) {
      if (err.code() != Errc::degenerate_hamiltonian) throw;
    }
  }
  throw Error(Errc::degenerate_hamiltonian,
              "no nondegenerate Hamiltonian after " + std::to_string(max_retries) + " retries");
}

Trajectory run_trajectory(const Observable& h, const Observable& a, const PureState& psi0,
                          double t_max, int n_steps, const SolverOptions& opts) {
  require_same_dim(h.dim(), a.dim(), "run_trajectory");
  require_same_dim(psi0.dim(), h.dim(), "run_trajectory");
  if (n_steps < 2) throw Error(Errc::invalid_spec, "n_steps must be >= 2");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw Error(Errc::invalid_spec, "t_max must be finite and > 0");
  }

  Trajectory tr;
  tr.norms = qsl_norms(h, a, opts);
  const Propagator u(h);
  const auto n = static_cast<std::size_t>(n_steps);
  tr.times.reserve(n);
  tr.states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    PureState psi = u(psi0, t);
    const double v = velocity(psi, h, a);
    const double mt = mt_bound(psi, h, a);
    const double aur = aur_qsl_bound(psi, h, a, tr.norms);
    if (v > mt + kQslTol || v > aur + kQslTol) {
      throw Error(Errc::invariant_violation,
                  "speed limit violated at t = " + std::to_string(t) + ": v = " +
                      std::to_string(v) + ", mt = " + std::to_string(mt) +
                      ", aur = " + std::to_string(aur));
    }
    tr.times.push_back(t);
    tr.expectation_a.push_back(expectation(psi, a));
    tr.velocity.push_back(v);
    tr.mt_bound.push_back(mt);
    tr.aur_bound.push_back(aur);
    tr.states.push_back(std::move(psi));
  }
  return tr;
}

}  // namespace opasym
