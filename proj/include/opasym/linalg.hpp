#pragma once

// Dense complex linear algebra used throughout the library: validated
// operator types, a cyclic Jacobi Hermitian eigensolver, singular values,
// Schatten norms and the handful of matrix functions the relations need.

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "opasym/error.hpp"

namespace opasym {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kNormTol = 1e-10;

/// Schatten exponent p in [1, inf]. Infinity is a distinguished state, not a
/// large float, so p = inf means "largest singular value" exactly.
class Exponent {
 public:
  // Implicit on purpose: `schatten_norm(m, 2)` reads naturally. Passing
  // +infinity maps onto the sentinel.
  Exponent(double p);  // NOLINT(google-explicit-constructor)

  static Exponent infinity() noexcept { return Exponent(); }
  /// Accepts decimal numbers and "inf"/"infinity" (case-insensitive).
  static Exponent parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  /// p itself; +inf for the sentinel.
  double value() const noexcept;
  /// 1/p with 1/inf = 0.
  double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / p_; }
  /// The Hoelder conjugate q with 1/p + 1/q = 1.
  Exponent conjugate() const;
  std::string str() const;

  friend bool operator==(const Exponent& a, const Exponent& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.p_ == b.p_);
  }

 private:
  Exponent() noexcept : p_(0.0), infinite_(true) {}
  double p_;
  bool infinite_;
};

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

class PureState;

/// Hermitian square matrix with finite entries. The stored matrix is the
/// exact Hermitian part of the input.
class Observable {
 public:
  explicit Observable(ComplexMatrix m, double hermiticity_tol = kHermiticityTol);

  static Observable pauli(char axis);  // 'x', 'y', 'z' or 'i'
  static Observable identity(Index dim);
  static Observable diagonal(const RealVector& entries);
  /// Hermitian part of m without the hermiticity check, for matrices that are
  /// Hermitian by construction up to roundoff (commutators of near-commuting
  /// pairs have no meaningful relative residual).
  static Observable symmetrized(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  ComplexMatrix m_;
};

/// Unit vector in C^dim.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes, double norm_tol = kNormTol);

  static PureState basis(Index dim, Index k);
  /// Rescales an arbitrary nonzero vector to unit norm.
  static PureState normalized(const ComplexVector& v);

  const ComplexVector& amplitudes() const noexcept { return psi_; }
  Index dim() const noexcept { return psi_.size(); }
  ComplexMatrix projector() const { return psi_ * psi_.adjoint(); }

 private:
  ComplexVector psi_;
};

/// Positive semidefinite, unit-trace Hermitian matrix. Eigenvalues in
/// [-psd_tol, 0) are clamped to zero on construction and the spectrum is kept
/// alongside the matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m, double psd_tol = kPsdTol);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Index dim);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  const EigenDecomposition& spectrum() const noexcept { return spectrum_; }

  double purity() const;
  bool is_pure(double tol = 1e-9) const;
  /// Eigenvector of the largest eigenvalue; throws not_pure unless is_pure(tol).
  PureState to_pure(double tol = 1e-9) const;

 private:
  ComplexMatrix m_;
  EigenDecomposition spectrum_;
};

// ---- basic helpers --------------------------------------------------------

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);
bool all_finite(const ComplexMatrix& m);
/// max|M - M^dagger| relative to max|M|.
double hermiticity_residual(const ComplexMatrix& m);

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y);

// ---- spectral routines ----------------------------------------------------

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigensolver for complex Hermitian matrices. Throws
/// not_hermitian when the input is not Hermitian within kHermiticityTol and
/// no_convergence after kJacobiMaxSweeps sweeps.
EigenDecomposition eig_hermitian(const ComplexMatrix& m);
EigenDecomposition eig_hermitian(const Observable& m);
/// Same, rotating by the unitary `start` first. Throws as above.
EigenDecomposition eig_hermitian(const ComplexMatrix& m, const ComplexMatrix& start);

/// Descending, nonnegative. Hermitian and anti-Hermitian inputs use
/// |eigenvalues| directly; general matrices go through eig(M^dagger M).
RealVector singular_values(const ComplexMatrix& m);

/// (sum sigma_i^p)^(1/p); max sigma_i for p = inf.
double schatten_norm(const ComplexMatrix& m, Exponent p);
double schatten_norm_of_values(const RealVector& singular_values, Exponent p);

/// Value of ||X||_p for Hermitian X together with a subgradient G (Hermitian,
/// Re Tr(G dX) is the directional derivative where the norm is smooth).
/// Ties at p = inf and zero eigenvalues at p = 1 use the averaged choice.
double schatten_subgradient(const ComplexMatrix& x_hermitian, Exponent p,
                            ComplexMatrix& subgradient);
/// As above; a square `basis` seeds the eigensolver and receives the new
/// eigenvectors, so a sequence of nearby calls converges in few sweeps.
double schatten_subgradient(const ComplexMatrix& x_hermitian, Exponent p,
                            ComplexMatrix& subgradient, ComplexMatrix* basis);

ComplexMatrix matrix_sqrt(const DensityMatrix& rho);

/// C = -i[A, B].
Observable commutator_c(const Observable& a, const Observable& b);

/// Re Tr(rho A); throws numerical if the imaginary part exceeds 1e-9.
double expectation(const DensityMatrix& rho, const Observable& a);
double expectation(const PureState& psi, const Observable& a);

/// Tr(X Y) without forming the product.
Complex trace_product(const ComplexMatrix& x, const ComplexMatrix& y);

void require_same_dim(Index a, Index b, std::string_view what);

}  // namespace opasym
