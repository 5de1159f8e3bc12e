#include "opasym/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace opasym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Route to |eigenvalues| when the input is (anti-)Hermitian to this level.
constexpr double kNormalShortcutTol = 1e-12;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require_square_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw Error(Errc::not_square, std::string(what) + " must be a nonempty square matrix");
  }
  if (!all_finite(m)) {
    throw Error(Errc::not_finite, std::string(what) + " has non-finite entries");
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return (m + m.adjoint()) * 0.5; }

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

// Cyclic Jacobi on an exactly Hermitian matrix. Each rotation is the complex
// unitary J = diag(1, e^{-i phi}) R(c, s), which zeroes a(p, q) in J^dagger A J.
// A unitary `start` rotates the problem first; a good guess leaves few sweeps.
EigenDecomposition jacobi(ComplexMatrix a, const ComplexMatrix* start = nullptr) {
  const Index n = a.rows();
  const double threshold = 1e-13 * a.norm();
  ComplexMatrix v;
  if (start) {
    v = *start;
    a = hermitian_part(v.adjoint() * a * v);
  } else {
    v = ComplexMatrix::Identity(n, n);
  }

  bool converged = false;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kJacobiMaxSweeps) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const Complex phase_conj = std::conj(apq) / r;  // e^{-i phi}

        const double theta = (aqq - app) / (2.0 * r);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * phase_conj;
        const Complex jqq = c * phase_conj;

        for (Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (!converged) {
    throw Error(Errc::no_convergence, "Jacobi eigensolver exceeded " +
                                          std::to_string(kJacobiMaxSweeps) + " sweeps");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

}  // namespace

// ---- Exponent ---------------------------------------------------------------

Exponent::Exponent(double p) : p_(p), infinite_(false) {
  if (std::isinf(p) && p > 0) {
    p_ = 0.0;
    infinite_ = true;
    return;
  }
  if (!(p >= 1.0)) {
    throw Error(Errc::invalid_exponent, "Schatten exponent must lie in [1, inf], got " +
                                            std::to_string(p));
  }
}

Exponent Exponent::parse(std::string_view text) {
  const std::string t = lower(text);
  if (t == "inf" || t == "infinity" || t == "+inf") return infinity();
  double p = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, p);
  if (ec != std::errc() || ptr != last) {
    throw Error(Errc::invalid_exponent, "cannot parse exponent '" + std::string(text) + "'");
  }
  return Exponent(p);
}

double Exponent::value() const noexcept { return infinite_ ? kInf : p_; }

Exponent Exponent::conjugate() const {
  if (infinite_) return Exponent(1.0);
  if (p_ == 1.0) return infinity();
  return Exponent(p_ / (p_ - 1.0));
}

std::string Exponent::str() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p_);
  return buf;
}

// ---- helpers ----------------------------------------------------------------

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

double hermiticity_residual(const ComplexMatrix& m) {
  const double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  return max_abs(m - m.adjoint()) / scale;
}

ComplexMatrix commutator(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_same_dim(x.rows(), y.rows(), "commutator");
  return x * y - y * x;
}

Complex trace_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_same_dim(x.rows(), y.rows(), "trace_product");
  return x.cwiseProduct(y.transpose()).sum();
}

void require_same_dim(Index a, Index b, std::string_view what) {
  if (a != b) {
    throw Error(Errc::dimension_mismatch, std::string(what) + ": dimensions " +
                                              std::to_string(a) + " and " + std::to_string(b));
  }
}

// ---- Observable / PureState / DensityMatrix ---------------------------------

Observable::Observable(ComplexMatrix m, double hermiticity_tol) {
  require_square_finite(m, "observable");
  if (hermiticity_residual(m) > hermiticity_tol) {
    throw Error(Errc::not_hermitian, "observable is not Hermitian");
  }
  m_ = hermitian_part(m);
}

Observable Observable::pauli(char axis) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case 'x': m << 0, 1, 1, 0; break;
    case 'y': m << 0, -i, i, 0; break;
    case 'z': m << 1, 0, 0, -1; break;
    case 'i': m << 1, 0, 0, 1; break;
    default:
      throw Error(Errc::invalid_spec, std::string("unknown Pauli axis '") + axis + "'");
  }
  return Observable(std::move(m));
}

Observable Observable::identity(Index dim) {
  return Observable(ComplexMatrix::Identity(dim, dim));
}

Observable Observable::diagonal(const RealVector& entries) {
  return Observable(entries.cast<Complex>().asDiagonal().toDenseMatrix());
}

Observable Observable::symmetrized(const ComplexMatrix& m) {
  require_square_finite(m, "observable");
  return Observable(hermitian_part(m), 0.0);
}

PureState::PureState(ComplexVector amplitudes, double norm_tol) {
  if (amplitudes.size() == 0) throw Error(Errc::not_square, "empty state vector");
  if (!all_finite(amplitudes)) throw Error(Errc::not_finite, "state has non-finite amplitudes");
  const double n = amplitudes.norm();
  if (std::abs(n - 1.0) > norm_tol) {
    throw Error(Errc::not_normalized, "state norm is " + std::to_string(n));
  }
  psi_ = amplitudes / n;
}

PureState PureState::basis(Index dim, Index k) {
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return PureState(std::move(v));
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(Errc::not_normalized, "cannot normalize vector");
  return PureState(v / n);
}

DensityMatrix::DensityMatrix(ComplexMatrix m, double psd_tol) {
  require_square_finite(m, "density matrix");
  if (hermiticity_residual(m) > kHermiticityTol) {
    throw Error(Errc::not_hermitian, "density matrix is not Hermitian");
  }
  m = hermitian_part(m);
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw Error(Errc::not_normalized, "density matrix trace is " + std::to_string(tr));
  }
  spectrum_ = jacobi(m);
  bool clamped = false;
  for (Index k = 0; k < spectrum_.eigenvalues.size(); ++k) {
    double& lambda = spectrum_.eigenvalues(k);
    if (lambda < -psd_tol) {
      throw Error(Errc::not_psd, "density matrix eigenvalue " + std::to_string(lambda));
    }
    if (lambda < 0.0) {
      lambda = 0.0;
      clamped = true;
    }
  }
  if (clamped) {
    const auto& v = spectrum_.eigenvectors;
    m = hermitian_part(v * spectrum_.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint());
  }
  m_ = std::move(m);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return spectrum_.eigenvalues.squaredNorm(); }

bool DensityMatrix::is_pure(double tol) const { return std::abs(purity() - 1.0) <= tol; }

PureState DensityMatrix::to_pure(double tol) const {
  if (!is_pure(tol)) {
    throw Error(Errc::not_pure, "state has purity " + std::to_string(purity()));
  }
  return PureState::normalized(spectrum_.eigenvectors.col(dim() - 1));
}

// ---- spectral routines ------------------------------------------------------

EigenDecomposition eig_hermitian(const ComplexMatrix& m) {
  require_square_finite(m, "eig_hermitian input");
  if (hermiticity_residual(m) > kHermiticityTol) {
    throw Error(Errc::not_hermitian, "eig_hermitian input is not Hermitian");
  }
  return jacobi(hermitian_part(m));
}

EigenDecomposition eig_hermitian(const Observable& m) { return jacobi(m.matrix()); }

EigenDecomposition eig_hermitian(const ComplexMatrix& m, const ComplexMatrix& start) {
  require_square_finite(m, "eig_hermitian");
  require_same_dim(m.rows(), start.rows(), "eig_hermitian");
  require_same_dim(m.rows(), start.cols(), "eig_hermitian");
  if (hermiticity_residual(m) > kHermiticityTol) {
    throw Error(Errc::not_hermitian, "eig_hermitian: input is not Hermitian");
  }
  return jacobi(hermitian_part(m), &start);
}

RealVector singular_values(const ComplexMatrix& m) {
  if (!all_finite(m)) throw Error(Errc::not_finite, "singular_values input has non-finite entries");
  if (m.rows() != m.cols()) throw Error(Errc::not_square, "singular_values expects a square matrix");
  const Index n = m.rows();
  RealVector sv(n);
  const double scale = max_abs(m);
  if (scale == 0.0) return RealVector::Zero(n);

  if (max_abs(m - m.adjoint()) <= kNormalShortcutTol * scale) {
    sv = jacobi(hermitian_part(m)).eigenvalues.cwiseAbs();
  } else if (max_abs(m + m.adjoint()) <= kNormalShortcutTol * scale) {
    const ComplexMatrix h = Complex(0.0, 1.0) * m;
    sv = jacobi(hermitian_part(h)).eigenvalues.cwiseAbs();
  } else {
    const RealVector gram = jacobi(hermitian_part(m.adjoint() * m)).eigenvalues;
    for (Index k = 0; k < n; ++k) {
      const double g = gram(k);
      sv(k) = (g < 0.0 && g >= -1e-12 * scale * scale) ? 0.0 : std::sqrt(std::max(g, 0.0));
    }
  }
  std::sort(sv.data(), sv.data() + n, std::greater<>());
  return sv;
}

double schatten_norm_of_values(const RealVector& sigma, Exponent p) {
  if (sigma.size() == 0) return 0.0;
  const double smax = sigma.maxCoeff();
  if (smax == 0.0 || p.is_infinite()) return smax;
  const double pv = p.value();
  double acc = 0.0;
  for (Index k = 0; k < sigma.size(); ++k) acc += std::pow(sigma(k) / smax, pv);
  return smax * std::pow(acc, 1.0 / pv);
}

double schatten_norm(const ComplexMatrix& m, Exponent p) {
  if (!p.is_infinite() && p.value() == 2.0) {
    if (!all_finite(m)) throw Error(Errc::not_finite, "schatten_norm input has non-finite entries");
    return m.norm();
  }
  return schatten_norm_of_values(singular_values(m), p);
}

double schatten_subgradient(const ComplexMatrix& x, Exponent p, ComplexMatrix& g) {
  return schatten_subgradient(x, p, g, nullptr);
}

double schatten_subgradient(const ComplexMatrix& x, Exponent p, ComplexMatrix& g,
                            ComplexMatrix* basis) {
  const Index n = x.rows();
  const bool warm = basis && basis->rows() == n && basis->cols() == n;
  const EigenDecomposition e = jacobi(hermitian_part(x), warm ? basis : nullptr);
  if (basis) *basis = e.eigenvectors;
  const RealVector abs_l = e.eigenvalues.cwiseAbs();
  const double smax = abs_l.size() ? abs_l.maxCoeff() : 0.0;
  RealVector coeff = RealVector::Zero(n);
  double value = 0.0;
  if (smax == 0.0) {
    g = ComplexMatrix::Zero(n, n);
    return 0.0;
  }
  const auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  if (p.is_infinite()) {
    value = smax;
    int ties = 0;
    for (Index k = 0; k < n; ++k) {
      if (abs_l(k) >= smax * (1.0 - 1e-12)) {
        coeff(k) = sign(e.eigenvalues(k));
        ++ties;
      }
    }
    coeff /= static_cast<double>(ties);
  } else if (p.value() == 1.0) {
    for (Index k = 0; k < n; ++k) {
      value += abs_l(k);
      if (abs_l(k) > 1e-14 * smax) coeff(k) = sign(e.eigenvalues(k));
    }
  } else {
    const double pv = p.value();
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) acc += std::pow(abs_l(k) / smax, pv);
    const double scaled_norm = std::pow(acc, 1.0 / pv);
    value = smax * scaled_norm;
    for (Index k = 0; k < n; ++k) {
      coeff(k) = sign(e.eigenvalues(k)) * std::pow(abs_l(k) / smax, pv - 1.0) /
                 std::pow(scaled_norm, pv - 1.0);
    }
  }
  g = e.eigenvectors * coeff.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
  return value;
}

ComplexMatrix matrix_sqrt(const DensityMatrix& rho) {
  const auto& spec = rho.spectrum();
  const double lmax = spec.eigenvalues.maxCoeff();
  // Eigenvalues at roundoff level are numerically zero; their square roots
  // would otherwise inject O(1e-8) noise.
  const double cutoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(lmax, 0.0);
  RealVector roots(spec.eigenvalues.size());
  for (Index k = 0; k < roots.size(); ++k) {
    const double l = spec.eigenvalues(k);
    if (l < -kPsdTol) throw Error(Errc::not_psd, "negative eigenvalue in matrix_sqrt");
    roots(k) = l <= cutoff ? 0.0 : std::sqrt(l);
  }
  const auto& v = spec.eigenvectors;
  return hermitian_part(v * roots.cast<Complex>().asDiagonal() * v.adjoint());
}

Observable commutator_c(const Observable& a, const Observable& b) {
  require_same_dim(a.dim(), b.dim(), "commutator_c");
  return Observable::symmetrized(Complex(0.0, -1.0) * commutator(a.matrix(), b.matrix()));
}

double expectation(const DensityMatrix& rho, const Observable& a) {
  require_same_dim(rho.dim(), a.dim(), "expectation");
  const Complex z = trace_product(rho.matrix(), a.matrix());
  if (std::abs(z.imag()) > 1e-9 * std::max(1.0, max_abs(a.matrix()))) {
    throw Error(Errc::numerical, "expectation has imaginary part " + std::to_string(z.imag()));
  }
  return z.real();
}

double expectation(const PureState& psi, const Observable& a) {
  require_same_dim(psi.dim(), a.dim(), "expectation");
  const Complex z = psi.amplitudes().dot(a.matrix() * psi.amplitudes());
  if (std::abs(z.imag()) > 1e-9 * std::max(1.0, max_abs(a.matrix()))) {
    throw Error(Errc::numerical, "expectation has imaginary part " + std::to_string(z.imag()));
  }
  return z.real();
}

}  // namespace opasym
