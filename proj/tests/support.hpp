#pragma once

// Test-only helpers. The oracles here go through Eigen's own solvers so they
// share no code with the library's Jacobi, singular-value or pinching paths.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "opasym/linalg.hpp"
#include "opasym/random.hpp"

namespace testing {

using opasym::ComplexMatrix;
using opasym::ComplexVector;
using opasym::Index;
using opasym::RealVector;

inline ComplexMatrix random_hermitian(Index d, opasym::Rng& rng) {
  const ComplexMatrix g = rng.complex_gaussian(d, d);
  return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_unitary(Index d, opasym::Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(rng.complex_gaussian(d, d));
  return qr.householderQ();
}

// Hermitian with prescribed spectrum in a random basis.
inline ComplexMatrix with_spectrum(const RealVector& ev, opasym::Rng& rng) {
  const ComplexMatrix u = random_unitary(ev.size(), rng);
  ComplexMatrix m = u * ev.cast<opasym::Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (m + m.adjoint());
}

inline ComplexVector random_ket(Index d, opasym::Rng& rng) {
  ComplexVector v = rng.complex_gaussian(d, 1).col(0);
  return v / v.norm();
}

inline RealVector oracle_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline RealVector oracle_singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues();
}

inline double oracle_schatten(const ComplexMatrix& m, double p) {
  const RealVector s = oracle_singular_values(m);
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc, 1.0 / p);
}

// Orthogonal (Hilbert-Schmidt) projection of B onto {X : [A, X] = 0}, found
// as a least-squares problem over a kernel basis of X -> AX - XA.
inline ComplexMatrix oracle_commutant_projection(const ComplexMatrix& a, const ComplexMatrix& b,
                                                 double rank_tol = 1e-9) {
  const Index d = a.rows();
  const Index n = d * d;
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  // vec(AX - XA) = (I kron A - A^T kron I) vec(X), column-major vec.
  ComplexMatrix l(n, n);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < d; ++k) {
        for (Index m = 0; m < d; ++m) {
          l(i * d + k, j * d + m) = id(i, j) * a(k, m) - a(j, i) * id(k, m);
        }
      }
    }
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(l, Eigen::ComputeFullV);
  const RealVector s = svd.singularValues();
  const double cut = rank_tol * std::max(1.0, s(0));
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  const ComplexMatrix kernel = svd.matrixV().rightCols(n - rank);  // orthonormal columns
  const ComplexVector vb = Eigen::Map<const ComplexVector>(b.data(), n);
  const ComplexVector proj = kernel * (kernel.adjoint() * vb);
  return Eigen::Map<const ComplexMatrix>(proj.data(), d, d);
}

}  // namespace testing
