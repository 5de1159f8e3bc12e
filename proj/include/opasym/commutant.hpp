#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "opasym/linalg.hpp"

namespace opasym {

/// One eigenvalue cluster of the source observable.
struct SpectralBlock {
  double eigenvalue;       // cluster mean
  ComplexMatrix projector; // onto the cluster's eigenspace
  Index multiplicity;
  Index offset;            // first column of the cluster in `basis`
};

/// The commutant C(A): every operator commuting with A is block diagonal in
/// `basis`, one full block per distinct eigenvalue.
struct CommutantStructure {
  Index source_dim = 0;
  std::vector<SpectralBlock> blocks;  // ascending eigenvalue
  ComplexMatrix basis;                // eigenvectors of A, grouped by block
};

/// 1e-8 * max(1, spectral range).
double default_cluster_tol(const RealVector& ascending_eigenvalues);

/// Groups the spectrum of `a` by single-linkage clustering: consecutive
/// eigenvalues closer than cluster_tol share a block.
CommutantStructure spectral_blocks(const Observable& a,
                                   std::optional<double> cluster_tol = std::nullopt);

/// sum_k P_k B P_k, the Hilbert-Schmidt projection of B onto C(A).
ComplexMatrix pinch(const ComplexMatrix& b, const CommutantStructure& s);
ComplexMatrix pinch(const Observable& b, const CommutantStructure& s);

enum class NormMethod { pinching_closed_form, subgradient, oracle };
std::string_view to_string(NormMethod m) noexcept;

// Both schemes minimise over Hermitian block-diagonal A_d, start at the
// pinching and consume the same subgradients of ||B - A_d||_p.
enum class SolverScheme {
  // Deep-cut ellipsoid method. Its cuts give a certified lower bound, and the
  // solver stops once (best - lower) <= tol * best.
  ellipsoid,
  // Projected subgradient descent with steps ||B||_p / sqrt(k); stops when the
  // best value moves by less than tol (relative) over 50 iterations.
  descent,
};

struct SolverOptions {
  int max_iters = 100000;
  double tol = 1e-9;
  std::optional<double> cluster_tol;
  SolverScheme scheme = SolverScheme::ellipsoid;
  // Run the iterative scheme even at p = 2 (cross-checks the closed form).
  bool force_iterative = false;
};

struct AsymmetryNormResult {
  double value = 0.0;
  ComplexMatrix optimizer;  // the minimising A_d, in the original basis
  NormMethod method = NormMethod::pinching_closed_form;
  int iterations = 0;
  bool converged = false;
  // Certified lower bound on the true minimum (equals value for the closed
  // form; zero when the scheme cannot certify one).
  double lower_bound = 0.0;
};

/// N_p(B|A) = min over A_d in C(A) of ||B - A_d||_p.
///
/// p = 2 is the pinching closed form. Other exponents run the configured
/// convex solver from the pinching, so the result never exceeds
/// ||B - pinch(B)||_p. Non-convergence is reported through `converged`; the
/// best iterate is always returned.
AsymmetryNormResult asymmetry_norm(const Observable& b, const Observable& a, Exponent p,
                                   const SolverOptions& opts = {});
AsymmetryNormResult asymmetry_norm(const Observable& b, const CommutantStructure& s, Exponent p,
                                   const SolverOptions& opts = {});

struct OracleOptions {
  int starts = 5;  // pinching plus starts - 1 random perturbations
  double min_step = 1e-7;
  std::uint64_t seed = 0x6f7261636c65ULL;
  std::optional<double> cluster_tol;
  // Up to this many real parameters the direct search is complemented by an
  // exhaustive nested golden-section search, which cannot stall on kinks.
  int exhaustive_max_params = 3;
  double section_tol = 1e-7;  // final bracket width relative to the radius
  // When false, no search starts from the pinching and the pinching value is
  // not a candidate: starts are random around zero and the bracket search is
  // centred at zero. Used to check the closed form from an independent route.
  bool anchor_at_pinching = true;
};

inline constexpr Index kOracleMaxDim = 4;

/// Derivative-free reference value for N_p(B|A): multi-start direct search
/// over the m^2 real parameters of each Hermitian block, polling coordinate
/// and random directions while halving the step down to min_step, followed by
/// a nested golden-section search for small parameter counts. Only objective
/// values ||B - A_d||_p are used and the smallest value found is returned.
/// Throws dimension_too_large above kOracleMaxDim.
double oracle_norm(const Observable& b, const Observable& a, Exponent p,
                   const OracleOptions& opts = {});

}  // namespace opasym
