// Reference minimiser for the asymmetry norm. Deliberately shares nothing with
// the solvers in commutant.cpp beyond the eigenbasis of A: its own (unscaled)
// parameterisation, objective values only, no subgradients.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "opasym/commutant.hpp"
#include "opasym/random.hpp"

namespace opasym {

namespace {

struct Layout {
  std::vector<std::pair<Index, Index>> blocks;  // offset, size
  Index n = 0;
};

// Block-diagonal Hermitian matrix in the eigenbasis: per block, diagonal
// entries then (re, im) of every upper entry.
ComplexMatrix assemble(const Layout& layout, Index dim, const std::vector<double>& x) {
  ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
  std::size_t k = 0;
  for (const auto& [o, m] : layout.blocks) {
    for (Index i = 0; i < m; ++i) d(o + i, o + i) = x[k++];
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        d(o + i, o + j) = Complex(x[k], x[k + 1]);
        d(o + j, o + i) = Complex(x[k], -x[k + 1]);
        k += 2;
      }
    }
  }
  return d;
}

std::vector<double> flatten(const Layout& layout, const ComplexMatrix& local) {
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(layout.n));
  for (const auto& [o, m] : layout.blocks) {
    for (Index i = 0; i < m; ++i) x.push_back(local(o + i, o + i).real());
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        x.push_back(local(o + i, o + j).real());
        x.push_back(local(o + i, o + j).imag());
      }
    }
  }
  return x;
}

// Minimises over x[k..] by golden-section search per coordinate, nesting the
// remaining coordinates inside each evaluation. Partial minimisation of a
// jointly convex function is convex, so every level is a unimodal 1-D search.
template <class F>
double nested_section(const F& objective, std::vector<double>& x, std::size_t k,
                      const std::vector<double>& centre, double radius, double rel_tol) {
  if (k == x.size()) return objective(x);
  constexpr double inv_phi = 0.6180339887498949;
  double lo = centre[k] - radius;
  double hi = centre[k] + radius;
  const auto eval_at = [&](double t) {
    x[k] = t;
    return nested_section(objective, x, k + 1, centre, radius, rel_tol);
  };
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = eval_at(c);
  double fd = eval_at(d);
  while (hi - lo > rel_tol * radius) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = eval_at(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = eval_at(d);
    }
  }
  const double best = fc <= fd ? c : d;
  return eval_at(best);
}

}  // namespace

double oracle_norm(const Observable& b, const Observable& a, Exponent p, const OracleOptions& opts) {
  require_same_dim(b.dim(), a.dim(), "oracle_norm");
  if (a.dim() > kOracleMaxDim) {
    throw Error(Errc::dimension_too_large, "oracle_norm supports dimension <= " +
                                               std::to_string(kOracleMaxDim));
  }
  const CommutantStructure s = spectral_blocks(a, opts.cluster_tol);
  const Index dim = a.dim();
  Layout layout;
  for (const auto& blk : s.blocks) {
    layout.blocks.emplace_back(blk.offset, blk.multiplicity);
    layout.n += blk.multiplicity * blk.multiplicity;
  }
  const ComplexMatrix& v = s.basis;

  const auto objective = [&](const std::vector<double>& x) {
    return schatten_norm(b.matrix() - v * assemble(layout, dim, x) * v.adjoint(), p);
  };

  const bool anchored = opts.anchor_at_pinching;
  const std::vector<double> pinched = flatten(layout, v.adjoint() * pinch(b, s) * v);
  const std::size_t n = pinched.size();
  const std::vector<double> centre = anchored ? pinched : std::vector<double>(n, 0.0);
  // Anchored: the pinching value. Otherwise ||B - 0||_p, which also bounds
  // the distance of the minimiser from zero by twice itself.
  const double f_ref = objective(centre);
  const double scale = anchored ? f_ref : 2.0 * f_ref;

  Rng rng(opts.seed);
  double overall = anchored ? f_ref : std::numeric_limits<double>::infinity();
  const double base_step = std::max(scale, 1e-3);

  for (int start = 0; start < std::max(opts.starts, 1); ++start) {
    std::vector<double> x = centre;
    if (start > 0 || !anchored) {
      const double spread = 0.5 * base_step / std::sqrt(static_cast<double>(n));
      for (double& xi : x) xi += spread * rng.normal();
    }
    double fx = objective(x);
    double h = base_step;

    std::vector<double> dir(n), trial(n);
    while (h >= opts.min_step) {
      bool improved = false;
      for (std::size_t d = 0; d < 2 * n; ++d) {
        // First n directions are the coordinate axes, the next n random.
        if (d < n) {
          std::fill(dir.begin(), dir.end(), 0.0);
          dir[d] = 1.0;
        } else {
          double norm = 0.0;
          for (double& c : dir) {
            c = rng.normal();
            norm += c * c;
          }
          norm = std::sqrt(norm);
          for (double& c : dir) c /= norm;
        }
        for (const double sign : {1.0, -1.0}) {
          double step = h;
          bool moved = false;
          while (true) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + sign * step * dir[i];
            const double ft = objective(trial);
            if (!(ft < fx)) break;
            x = trial;
            fx = ft;
            moved = true;
            step *= 2.0;
          }
          if (moved) {
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    overall = std::min(overall, fx);
  }

  if (n <= static_cast<std::size_t>(opts.exhaustive_max_params) && f_ref > 0.0) {
    // The minimiser lies within Frobenius distance scale * max(1, d^(1/2-1/p))
    // of the centre, which bounds every raw coordinate too.
    const double radius =
        scale * std::max(1.0, std::pow(static_cast<double>(dim), 0.5 - p.reciprocal())) *
        (1.0 + 1e-6);
    std::vector<double> x = centre;
    overall = std::min(overall, nested_section(objective, x, 0, centre, radius, opts.section_tol));
  }
  return overall;
}

}  // namespace opasym
