#include "opasym/commutant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace opasym {

namespace {

// Orthonormal real coordinates (Hilbert-Schmidt inner product) on the space of
// Hermitian block-diagonal matrices, expressed in the source eigenbasis.
// Per block of size m: m diagonal entries, then Re/Im of each upper entry
// scaled by 1/sqrt(2).
class BlockFrame {
 public:
  explicit BlockFrame(const CommutantStructure& s) {
    for (const auto& b : s.blocks) {
      blocks_.emplace_back(b.offset, b.multiplicity);
      n_params_ += b.multiplicity * b.multiplicity;
    }
  }

  Index size() const noexcept { return n_params_; }

  // d -= Delta(x)
  void subtract(const RealVector& x, ComplexMatrix& d) const {
    Index k = 0;
    constexpr double r = std::numbers::sqrt2 * 0.5;
    for (const auto& [o, m] : blocks_) {
      for (Index i = 0; i < m; ++i) d(o + i, o + i) -= x(k++);
      for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
          const Complex v(x(k) * r, x(k + 1) * r);
          k += 2;
          d(o + i, o + j) -= v;
          d(o + j, o + i) -= std::conj(v);
        }
      }
    }
  }

  // Components of Hermitian g along the basis: Re Tr(g E_k).
  RealVector coordinates(const ComplexMatrix& g) const {
    RealVector c(n_params_);
    Index k = 0;
    constexpr double s2 = std::numbers::sqrt2;
    for (const auto& [o, m] : blocks_) {
      for (Index i = 0; i < m; ++i) c(k++) = g(o + i, o + i).real();
      for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
          c(k++) = s2 * g(o + i, o + j).real();
          c(k++) = s2 * g(o + i, o + j).imag();
        }
      }
    }
    return c;
  }

 private:
  std::vector<std::pair<Index, Index>> blocks_;
  Index n_params_ = 0;
};

ComplexMatrix block_part(const ComplexMatrix& m, const CommutantStructure& s) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (const auto& b : s.blocks) {
    out.block(b.offset, b.offset, b.multiplicity, b.multiplicity) =
        m.block(b.offset, b.offset, b.multiplicity, b.multiplicity);
  }
  return out;
}

struct SearchOutcome {
  RealVector x;
  double best = 0.0;
  double lower = 0.0;
  int iterations = 0;
  bool converged = false;
};

// f(x) = || off - Delta(x) ||_p, gradient in coordinates = -coords(G).
// Successive iterates are close, so the previous eigenbasis seeds the
// eigensolver; a cold start every kColdEvery calls bounds its unitarity drift.
class Objective {
 public:
  Objective(const ComplexMatrix& off, const BlockFrame& frame, Exponent p)
      : off_(off), frame_(frame), p_(p) {}

  double operator()(const RealVector& x, RealVector& grad) {
    ComplexMatrix xm = off_;
    frame_.subtract(x, xm);
    ComplexMatrix g;
    if (calls_++ % kColdEvery == 0) basis_.resize(0, 0);
    const double f = schatten_subgradient(xm, p_, g, &basis_);
    grad = -frame_.coordinates(g);
    return f;
  }

 private:
  static constexpr int kColdEvery = 64;
  const ComplexMatrix& off_;
  const BlockFrame& frame_;
  Exponent p_;
  ComplexMatrix basis_;
  int calls_ = 0;
};

SearchOutcome ellipsoid(const ComplexMatrix& off, const BlockFrame& frame, Exponent p, double f0,
                        const SolverOptions& opts) {
  const Index n = frame.size();
  const double nd = static_cast<double>(n);
  const double dim = static_cast<double>(off.rows());
  // ||A_d* - pinch(B)||_p <= ||B - A_d*||_p <= f0 since pinching is a
  // contraction fixing A_d*; convert to Frobenius radius.
  const double radius = f0 * std::max(1.0, std::pow(dim, 0.5 - p.reciprocal())) * (1.0 + 1e-9);

  SearchOutcome out;
  out.x = RealVector::Zero(n);
  out.best = f0;
  RealVector x = out.x;
  Eigen::MatrixXd shape = Eigen::MatrixXd::Identity(n, n) * (radius * radius);
  RealVector g;
  Objective evaluate(off, frame, p);

  for (int it = 1; it <= opts.max_iters; ++it) {
    out.iterations = it;
    const double f = evaluate(x, g);
    if (f < out.best) {
      out.best = f;
      out.x = x;
    }
    const RealVector pg = shape * g;
    const double gpg = g.dot(pg);
    if (!(gpg > 0.0)) {
      // Zero subgradient: x is a minimiser.
      out.lower = std::max(out.lower, f);
      out.converged = true;
      break;
    }
    const double root = std::sqrt(gpg);
    out.lower = std::max(out.lower, f - root);
    if (out.best - out.lower <= opts.tol * out.best) {
      out.converged = true;
      break;
    }
    const double alpha = (f - out.best) / root;
    if (alpha >= 1.0) {
      out.lower = out.best;
      out.converged = true;
      break;
    }
    const RealVector step = pg / root;
    x -= ((1.0 + nd * alpha) / (nd + 1.0)) * step;
    const double shrink = nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0);
    const double rank1 = 2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha));
    shape = shrink * (shape - rank1 * step * step.transpose());
    shape = 0.5 * (shape + shape.transpose()).eval();
  }
  out.lower = std::min(out.lower, out.best);
  return out;
}

SearchOutcome descent(const ComplexMatrix& off, const BlockFrame& frame, Exponent p, double f0,
                      double step_scale, const SolverOptions& opts) {
  SearchOutcome out;
  out.x = RealVector::Zero(frame.size());
  out.best = f0;
  RealVector x = out.x;
  RealVector g;
  Objective evaluate(off, frame, p);
  double checkpoint = f0;
  for (int k = 1; k <= opts.max_iters; ++k) {
    out.iterations = k;
    const double f = evaluate(x, g);
    if (f < out.best) {
      out.best = f;
      out.x = x;
    }
    const double gn = g.norm();
    if (gn == 0.0) {
      out.lower = f;
      out.converged = true;
      break;
    }
    x -= (step_scale / std::sqrt(static_cast<double>(k))) * (g / gn);
    if (k % 50 == 0) {
      if (checkpoint - out.best <= opts.tol * out.best) {
        out.converged = true;
        break;
      }
      checkpoint = out.best;
    }
  }
  return out;
}

}  // namespace

double default_cluster_tol(const RealVector& ev) {
  const double range = ev.size() ? ev.maxCoeff() - ev.minCoeff() : 0.0;
  return 1e-8 * std::max(1.0, range);
}

CommutantStructure spectral_blocks(const Observable& a, std::optional<double> cluster_tol) {
  const EigenDecomposition e = eig_hermitian(a);
  const double tol = cluster_tol.value_or(default_cluster_tol(e.eigenvalues));
  if (!(tol > 0.0)) throw Error(Errc::invalid_spec, "cluster_tol must be positive");

  CommutantStructure s;
  s.source_dim = a.dim();
  s.basis = e.eigenvectors;
  const Index n = a.dim();
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || e.eigenvalues(k) - e.eigenvalues(k - 1) > tol) {
      const Index m = k - start;
      const auto cols = s.basis.middleCols(start, m);
      s.blocks.push_back(SpectralBlock{e.eigenvalues.segment(start, m).mean(),
                                       cols * cols.adjoint(), m, start});
      start = k;
    }
  }
  return s;
}

ComplexMatrix pinch(const ComplexMatrix& b, const CommutantStructure& s) {
  require_same_dim(b.rows(), s.source_dim, "pinch");
  const ComplexMatrix local = s.basis.adjoint() * b * s.basis;
  const ComplexMatrix back = s.basis * block_part(local, s) * s.basis.adjoint();
  return (back + back.adjoint()) * 0.5;
}

ComplexMatrix pinch(const Observable& b, const CommutantStructure& s) { return pinch(b.matrix(), s); }

std::string_view to_string(NormMethod m) noexcept {
  switch (m) {
    case NormMethod::pinching_closed_form: return "pinching_closed_form";
    case NormMethod::subgradient: return "subgradient";
    case NormMethod::oracle: return "oracle";
  }
  return "unknown";
}

AsymmetryNormResult asymmetry_norm(const Observable& b, const Observable& a, Exponent p,
                                   const SolverOptions& opts) {
  require_same_dim(b.dim(), a.dim(), "asymmetry_norm");
  return asymmetry_norm(b, spectral_blocks(a, opts.cluster_tol), p, opts);
}

AsymmetryNormResult asymmetry_norm(const Observable& b, const CommutantStructure& s, Exponent p,
                                   const SolverOptions& opts) {
  require_same_dim(b.dim(), s.source_dim, "asymmetry_norm");
  const ComplexMatrix& v = s.basis;
  ComplexMatrix local = v.adjoint() * b.matrix() * v;
  local = (local + local.adjoint()) * 0.5;
  const ComplexMatrix diag_part = block_part(local, s);
  const ComplexMatrix off = local - diag_part;

  AsymmetryNormResult r;
  ComplexMatrix pinched = v * diag_part * v.adjoint();
  pinched = (pinched + pinched.adjoint()) * 0.5;

  const bool closed_form = !p.is_infinite() && p.value() == 2.0 && !opts.force_iterative;
  const double f0 = schatten_norm(off, p);
  const double scale = max_abs(b.matrix());
  if (closed_form || f0 <= 1e-15 * scale || s.blocks.size() == 1) {
    // Single block or numerically commuting: the pinching itself is optimal.
    r.optimizer = pinched;
    r.value = closed_form ? schatten_norm(b.matrix() - pinched, p) : f0;
    r.method = closed_form ? NormMethod::pinching_closed_form : NormMethod::subgradient;
    r.converged = true;
    r.lower_bound = closed_form ? r.value : 0.0;
    return r;
  }

  const BlockFrame frame(s);
  SearchOutcome found;
  if (opts.scheme == SolverScheme::ellipsoid) {
    found = ellipsoid(off, frame, p, f0, opts);
  } else {
    found = descent(off, frame, p, f0, schatten_norm(b.matrix(), p), opts);
  }

  ComplexMatrix best_local = diag_part;
  {
    ComplexMatrix neg = ComplexMatrix::Zero(local.rows(), local.cols());
    frame.subtract(found.x, neg);
    best_local -= neg;
  }
  r.optimizer = v * best_local * v.adjoint();
  r.optimizer = (r.optimizer + r.optimizer.adjoint()) * 0.5;
  r.method = NormMethod::subgradient;
  r.iterations = found.iterations;
  r.converged = found.converged;
  r.value = found.x.isZero(0.0) ? schatten_norm(b.matrix() - pinched, p)
                                : schatten_norm(b.matrix() - r.optimizer, p);
  r.lower_bound = std::min(found.lower, r.value);
  return r;
}

}  // namespace opasym
