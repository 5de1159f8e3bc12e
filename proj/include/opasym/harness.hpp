#pragma once

// Random instance ensembles, relation sweeps with per-instance seeding, and
// the two closed-form scenarios (qubit family, two-level counterexample).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opasym/relations.hpp"

namespace opasym {

class Rng;

enum class StateKind { haar_pure, mixed_full_rank, mixed_low_rank };
enum class ObservableKind { gaussian_hermitian, pauli_combination, bounded_spectrum };

std::string_view to_string(StateKind k) noexcept;
std::string_view to_string(ObservableKind k) noexcept;
std::optional<StateKind> parse_state_kind(std::string_view name) noexcept;
std::optional<ObservableKind> parse_observable_kind(std::string_view name) noexcept;

struct EnsembleSpec {
  Index dim = 2;
  StateKind state_kind = StateKind::mixed_full_rank;
  Index rank = 1;  // mixed_low_rank only
  ObservableKind observable_kind = ObservableKind::gaussian_hermitian;
  double lambda_min = -1.0;  // bounded_spectrum only
  double lambda_max = 1.0;
  // B is drawn as a real quadratic polynomial in A, so [A, B] = 0.
  bool commuting_pair = false;
  std::uint64_t seed = 0;
};

/// Throws invalid_spec for inconsistent fields.
void validate(const EnsembleSpec& spec);

/// Haar unitary from the QR factorisation of a complex Gaussian matrix with
/// the phases of R's diagonal divided out.
ComplexMatrix haar_unitary(Index dim, Rng& rng);

PureState gen_pure_state(const EnsembleSpec& spec, Rng& rng);
/// haar_pure yields a rank-one density matrix; mixed kinds use G G^dagger / Tr
/// with G of shape dim x rank.
DensityMatrix gen_state(const EnsembleSpec& spec, Rng& rng);
Observable gen_observable(const EnsembleSpec& spec, Rng& rng);

struct SweepExponents {
  ConjugatePair pq{2.0};
  ConjugatePair rs{2.0};
};

struct SweepOptions {
  RelationOptions relation;
  unsigned threads = 1;
};

struct SweepRow {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::optional<BoundReport> report;  // empty for quarantined instances
  std::string failure;                // error code and message otherwise
};

inline constexpr std::size_t kSlackBuckets = 8;
/// Labels of the slack histogram buckets, lowest first.
const std::array<std::string_view, kSlackBuckets>& slack_bucket_labels() noexcept;
std::size_t slack_bucket(double slack, double report_tol) noexcept;

struct SummaryStats {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct SweepResult {
  Relation relation = Relation::robertson;
  EnsembleSpec spec;
  SweepExponents exponents;
  std::size_t n_instances = 0;
  std::size_t n_violations = 0;  // slack < -report_tol
  std::size_t n_failures = 0;    // quarantined numerical failures
  std::size_t n_degenerate = 0;
  double worst_slack = 0.0;      // minimum slack; +inf when nothing evaluated
  std::array<std::size_t, kSlackBuckets> slack_histogram{};
  std::optional<SummaryStats> refinement;  // cor1 / cor2
  double elapsed_seconds = 0.0;
  std::vector<SweepRow> rows;    // ordered by index
};

/// Evaluates `relation` on n instances; instance i draws from
/// Rng(instance_seed(spec.seed, i)) in the order state, A, B. Results do not
/// depend on the thread count.
SweepResult sweep(Relation relation, const EnsembleSpec& spec, std::size_t n,
                  const SweepExponents& exponents = {}, const SweepOptions& opts = {});

// ---- closed-form scenarios -------------------------------------------------

struct ScenarioCheck {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct QubitRow {
  double theta = 0.0;
  Exponent p = 2.0;
  Exponent r = 2.0;
  double norm_b_given_a = 0.0;
  double norm_a_given_b = 0.0;
  double norm_expected_p = 0.0;  // 2^(1/p) sin(theta)
  double norm_expected_r = 0.0;
  double refinement = 0.0;
  double refinement_expected = 0.0;  // |<sigma_y>| / sin(theta)
  double aur_rhs = 0.0;              // expected <sigma_y>^2
  double robertson_rhs = 0.0;        // expected |<sigma_y>| sin(theta)
  double sigma_y = 0.0;
};

struct ScenarioReport {
  std::string scenario;
  std::vector<ScenarioCheck> checks;
  std::vector<QubitRow> qubit_rows;  // qubit scenario only
  bool all_pass() const;
};

/// A = sigma_z, B(theta) = cos(theta) sigma_z + sin(theta) sigma_x. Rows cover
/// every (theta, p) with r = p, then every (theta, p, r) pair over
/// p_list x {1, 2, inf} for the conjugate-pair invariance of R. Norm
/// tolerances are 1e-8 at p = 2 and 1e-5 otherwise; refinement and bound
/// tolerances 1e-8.
ScenarioReport reproduce_qubit_example(const std::vector<double>& theta_grid,
                                       const std::vector<Exponent>& p_list, const PureState& psi,
                                       const SolverOptions& solver = {});

/// A = sigma_x, B = sigma_y, rho = diag(3/4, 1/4).
ScenarioReport reproduce_counterexample(const SolverOptions& solver = {});

}  // namespace opasym
