#include "opasym/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "opasym/random.hpp"

namespace opasym {

std::string_view to_string(StateKind k) noexcept {
  switch (k) {
    case StateKind::haar_pure: return "haar_pure";
    case StateKind::mixed_full_rank: return "mixed_full_rank";
    case StateKind::mixed_low_rank: return "mixed_low_rank";
  }
  return "unknown";
}

std::string_view to_string(ObservableKind k) noexcept {
  switch (k) {
    case ObservableKind::gaussian_hermitian: return "gaussian_hermitian";
    case ObservableKind::pauli_combination: return "pauli_combination";
    case ObservableKind::bounded_spectrum: return "bounded_spectrum";
  }
  return "unknown";
}

std::optional<StateKind> parse_state_kind(std::string_view name) noexcept {
  for (StateKind k : {StateKind::haar_pure, StateKind::mixed_full_rank, StateKind::mixed_low_rank}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::optional<ObservableKind> parse_observable_kind(std::string_view name) noexcept {
  for (ObservableKind k : {ObservableKind::gaussian_hermitian, ObservableKind::pauli_combination,
                           ObservableKind::bounded_spectrum}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void validate(const EnsembleSpec& spec) {
  if (spec.dim < 2) throw Error(Errc::invalid_spec, "dim must be >= 2");
  if (spec.state_kind == StateKind::mixed_low_rank && (spec.rank < 1 || spec.rank > spec.dim)) {
    throw Error(Errc::invalid_spec, "rank must lie in [1, dim]");
  }
  if (spec.observable_kind == ObservableKind::pauli_combination && spec.dim != 2) {
    throw Error(Errc::invalid_spec, "pauli_combination requires dim = 2");
  }
  if (spec.observable_kind == ObservableKind::bounded_spectrum &&
      !(spec.lambda_min <= spec.lambda_max && std::isfinite(spec.lambda_min) &&
        std::isfinite(spec.lambda_max))) {
    throw Error(Errc::invalid_spec, "bounded_spectrum needs finite lambda_min <= lambda_max");
  }
}

ComplexMatrix haar_unitary(Index dim, Rng& rng) {
  const ComplexMatrix z = rng.complex_gaussian(dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex rk = r(k, k);
    const double mag = std::abs(rk);
    if (mag > 0.0) q.col(k) *= rk / mag;
  }
  return q;
}

PureState gen_pure_state(const EnsembleSpec& spec, Rng& rng) {
  validate(spec);
  return PureState::normalized(rng.complex_gaussian(spec.dim, 1).col(0));
}

DensityMatrix gen_state(const EnsembleSpec& spec, Rng& rng) {
  validate(spec);
  switch (spec.state_kind) {
    case StateKind::haar_pure:
      return DensityMatrix::from_pure(gen_pure_state(spec, rng));
    case StateKind::mixed_full_rank:
    case StateKind::mixed_low_rank: {
      const Index rank = spec.state_kind == StateKind::mixed_full_rank ? spec.dim : spec.rank;
      const ComplexMatrix g = rng.complex_gaussian(spec.dim, rank);
      ComplexMatrix rho = g * g.adjoint();
      rho /= rho.trace().real();
      rho = 0.5 * (rho + rho.adjoint()).eval();
      return DensityMatrix(std::move(rho));
    }
  }
  throw Error(Errc::invalid_spec, "unknown state kind");
}

Observable gen_observable(const EnsembleSpec& spec, Rng& rng) {
  validate(spec);
  const Index d = spec.dim;
  switch (spec.observable_kind) {
    case ObservableKind::gaussian_hermitian: {
      const ComplexMatrix g = rng.complex_gaussian(d, d);
      return Observable(0.5 * (g + g.adjoint()));
    }
    case ObservableKind::pauli_combination: {
      ComplexMatrix m = rng.normal() * Observable::pauli('i').matrix();
      for (char axis : {'x', 'y', 'z'}) m += rng.normal() * Observable::pauli(axis).matrix();
      return Observable(std::move(m));
    }
    case ObservableKind::bounded_spectrum: {
      const ComplexMatrix u = haar_unitary(d, rng);
      RealVector ev(d);
      for (Index k = 0; k < d; ++k) ev(k) = rng.uniform(spec.lambda_min, spec.lambda_max);
      return Observable::symmetrized(u * ev.cast<Complex>().asDiagonal() * u.adjoint());
    }
  }
  throw Error(Errc::invalid_spec, "unknown observable kind");
}

const std::array<std::string_view, kSlackBuckets>& slack_bucket_labels() noexcept {
  static constexpr std::array<std::string_view, kSlackBuckets> labels{
      "violation", "[-tol,0)", "[0,1e-12)", "[1e-12,1e-9)",
      "[1e-9,1e-6)", "[1e-6,1e-3)", "[1e-3,1)", "[1,inf)"};
  return labels;
}

std::size_t slack_bucket(double slack, double report_tol) noexcept {
  if (slack < -report_tol) return 0;
  if (slack < 0.0) return 1;
  static constexpr std::array<double, 5> upper{1e-12, 1e-9, 1e-6, 1e-3, 1.0};
  for (std::size_t k = 0; k < upper.size(); ++k) {
    if (slack < upper[k]) return k + 2;
  }
  return kSlackBuckets - 1;
}

namespace {

BoundReport evaluate_instance(Relation relation, const EnsembleSpec& spec,
                              const SweepExponents& ex, const RelationOptions& ro, Rng& rng) {
  const auto pure_only = [&] {
    if (spec.state_kind != StateKind::haar_pure) {
      throw Error(Errc::invalid_spec, std::string(to_string(relation)) + " needs haar_pure states");
    }
  };
  std::optional<PureState> psi;
  std::optional<DensityMatrix> rho;
  if (relation == Relation::cor1) {
    pure_only();
    psi = gen_pure_state(spec, rng);
  } else if (spec.state_kind == StateKind::haar_pure) {
    psi = gen_pure_state(spec, rng);
    rho = DensityMatrix::from_pure(*psi);
  } else {
    rho = gen_state(spec, rng);
  }

  const Observable a = gen_observable(spec, rng);
  std::optional<Observable> b_storage;
  if (spec.commuting_pair) {
    const double c2 = rng.normal(), c1 = rng.normal(), c0 = rng.normal();
    ComplexMatrix m = c2 * (a.matrix() * a.matrix()) + c1 * a.matrix();
    m.diagonal().array() += c0;
    b_storage.emplace(Observable::symmetrized(m));
  } else {
    b_storage.emplace(gen_observable(spec, rng));
  }
  const Observable& b = *b_storage;

  switch (relation) {
    case Relation::robertson:
      return psi ? robertson(*psi, a, b, ro) : robertson(*rho, a, b, ro);
    case Relation::thm1: return thm1(*rho, a, b, ex.pq, ex.rs, ro);
    case Relation::thm2: return thm2(*rho, a, b, ex.pq, ex.rs, ro);
    case Relation::cor1: return cor1(*psi, a, b, ex.pq, ex.rs, ro);
    case Relation::cor2: return cor2(*rho, a, b, ro);
    case Relation::luo_historical: return luo_historical(*rho, a, b, ro);
    case Relation::holder_step: {
      const AsymmetryNormResult opt = asymmetry_norm(b, a, ex.pq.p(), ro.solver);
      return holder_step_check(*rho, a, b, opt.optimizer, ex.pq, ro);
    }
  }
  throw Error(Errc::invalid_spec, "unknown relation");
}

// Precondition failures are the caller's fault and abort the sweep; anything
// else is a per-instance numerical defect.
bool quarantinable(Errc c) noexcept {
  return c != Errc::invalid_spec && c != Errc::invalid_exponent &&
         c != Errc::dimension_mismatch;
}

SweepRow run_instance(Relation relation, const EnsembleSpec& spec, const SweepExponents& ex,
                      const RelationOptions& ro, std::uint64_t i) {
  SweepRow row;
  row.index = i;
  row.seed = instance_seed(spec.seed, i);
  Rng rng(row.seed);
  try {
    BoundReport rep = evaluate_instance(relation, spec, ex, ro, rng);
    rep.meta.seed = row.seed;
    row.report = std::move(rep);
  } catch (const Error& err) {
    if (!quarantinable(err.code())) throw;
    row.failure = err.what();
  }
  return row;
}

}  // namespace

SweepResult sweep(Relation relation, const EnsembleSpec& spec, std::size_t n,
                  const SweepExponents& exponents, const SweepOptions& opts) {
  validate(spec);
  if (n < 1) throw Error(Errc::invalid_spec, "sweep needs n >= 1");
  if (relation == Relation::cor1 && spec.state_kind != StateKind::haar_pure) {
    throw Error(Errc::invalid_spec, "cor1 needs haar_pure states");
  }
  const auto start = std::chrono::steady_clock::now();

  SweepResult res;
  res.relation = relation;
  res.spec = spec;
  res.exponents = exponents;
  res.n_instances = n;
  res.rows.resize(n);

  const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      res.rows[i] = run_instance(relation, spec, exponents, opts.relation, i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            res.rows[i] = run_instance(relation, spec, exponents, opts.relation, i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next = n;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  res.worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> refinements;
  for (const SweepRow& row : res.rows) {
    if (!row.report) {
      ++res.n_failures;
      continue;
    }
    const BoundReport& rep = *row.report;
    if (rep.slack < -opts.relation.report_tol) ++res.n_violations;
    if (rep.meta.degenerate) ++res.n_degenerate;
    res.worst_slack = std::min(res.worst_slack, rep.slack);
    ++res.slack_histogram[slack_bucket(rep.slack, opts.relation.report_tol)];
    if (rep.refinement && !rep.meta.degenerate) refinements.push_back(*rep.refinement);
  }
  if (!refinements.empty()) {
    std::sort(refinements.begin(), refinements.end());
    const std::size_t m = refinements.size();
    SummaryStats st;
    st.min = refinements.front();
    st.max = refinements.back();
    st.median = m % 2 ? refinements[m / 2] : 0.5 * (refinements[m / 2 - 1] + refinements[m / 2]);
    st.count = m;
    res.refinement = st;
  }
  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

bool ScenarioReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ScenarioCheck& c) { return c.pass; });
}

namespace {

void add_check(ScenarioReport& rep, std::string name, double computed, double expected,
               double tol) {
  rep.checks.push_back(ScenarioCheck{std::move(name), computed, expected, tol,
                                     std::abs(computed - expected) <= tol});
}

std::string label(double theta, Exponent p, Exponent r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "theta=%.6f p=%s r=%s", theta, p.str().c_str(), r.str().c_str());
  return buf;
}

}  // namespace

ScenarioReport reproduce_qubit_example(const std::vector<double>& theta_grid,
                                       const std::vector<Exponent>& p_list, const PureState& psi,
                                       const SolverOptions& solver) {
  require_same_dim(psi.dim(), 2, "reproduce_qubit_example");
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15)) {
      throw Error(Errc::invalid_spec, "theta must lie in (0, pi/2]");
    }
  }
  ScenarioReport rep;
  rep.scenario = "qubit";
  const Observable a = Observable::pauli('z');
  const Observable sy = Observable::pauli('y');
  const double y = expectation(psi, sy);
  RelationOptions ro;
  ro.solver = solver;

  const Exponent inf = Exponent::infinity();
  const std::vector<Exponent> partners{1.0, 2.0, inf};

  for (double theta : theta_grid) {
    const double st = std::sin(theta);
    const Observable b(std::cos(theta) * Observable::pauli('z').matrix() +
                       st * Observable::pauli('x').matrix());
    double r_min = std::numeric_limits<double>::infinity();
    double r_max = -r_min;

    const auto evaluate = [&](Exponent p, Exponent r, bool check_norms) {
      QubitRow row;
      row.theta = theta;
      row.p = p;
      row.r = r;
      row.sigma_y = y;
      row.norm_b_given_a = asymmetry_norm(b, a, p, solver).value;
      row.norm_a_given_b = asymmetry_norm(a, b, r, solver).value;
      row.norm_expected_p = std::pow(2.0, p.reciprocal()) * st;
      row.norm_expected_r = std::pow(2.0, r.reciprocal()) * st;
      const BoundReport c1 = cor1(psi, a, b, ConjugatePair(p), ConjugatePair(r), ro);
      row.refinement = c1.refinement.value_or(0.0);
      row.refinement_expected = std::abs(y) / st;
      row.aur_rhs = c1.rhs;
      row.robertson_rhs = robertson(psi, a, b, ro).rhs;
      r_min = std::min(r_min, row.refinement);
      r_max = std::max(r_max, row.refinement);

      const std::string tag = label(theta, p, r);
      if (check_norms) {
        add_check(rep, "N_p(B|A) " + tag, row.norm_b_given_a, row.norm_expected_p,
                  p == Exponent(2.0) ? 1e-8 : 1e-5);
        add_check(rep, "N_r(A|B) " + tag, row.norm_a_given_b, row.norm_expected_r,
                  r == Exponent(2.0) ? 1e-8 : 1e-5);
        add_check(rep, "aur_rhs " + tag, row.aur_rhs, y * y, 1e-8);
        add_check(rep, "robertson_rhs " + tag, row.robertson_rhs, std::abs(y) * st, 1e-8);
      }
      add_check(rep, "R " + tag, row.refinement, row.refinement_expected, 1e-8);
      rep.qubit_rows.push_back(row);
    };

    for (Exponent p : p_list) evaluate(p, p, true);
    for (Exponent p : p_list) {
      for (Exponent r : partners) {
        if (!(r == p)) evaluate(p, r, false);
      }
    }
    char name[64];
    std::snprintf(name, sizeof name, "R spread theta=%.6f", theta);
    add_check(rep, name, r_max - r_min, 0.0, 1e-8);
  }
  return rep;
}

ScenarioReport reproduce_counterexample(const SolverOptions& solver) {
  ScenarioReport rep;
  rep.scenario = "counterexample";
  const Observable a = Observable::pauli('x');
  const Observable b = Observable::pauli('y');
  RealVector diag(2);
  diag << 0.75, 0.25;
  const DensityMatrix rho(diag.cast<Complex>().asDiagonal().toDenseMatrix());
  const Observable c = commutator_c(a, b);
  RelationOptions ro;
  ro.solver = solver;

  const double sqrt3 = std::sqrt(3.0);
  const double skew = std::pow((sqrt3 - 1.0) / 2.0, 2);
  add_check(rep, "I(rho,A)", wysi(rho, a), skew, 1e-10);
  add_check(rep, "I(rho,B)", wysi(rho, b), skew, 1e-10);
  add_check(rep, "|Tr(rho C)|", std::abs(trace_product(rho.matrix(), c.matrix())), 1.0, 1e-10);
  add_check(rep, "|Tr(sqrt(rho) C)|", std::abs(trace_product(matrix_sqrt(rho), c.matrix())),
            sqrt3 - 1.0, 1e-10);
  add_check(rep, "N_2(B|A)", asymmetry_norm(b, a, 2.0, solver).value, std::numbers::sqrt2, 1e-10);
  add_check(rep, "N_2(A|B)", asymmetry_norm(a, b, 2.0, solver).value, std::numbers::sqrt2, 1e-10);

  const BoundReport luo = luo_historical(rho, a, b, ro);
  add_check(rep, "luo lhs", luo.lhs, skew, 1e-10);
  add_check(rep, "luo rhs", luo.rhs, 0.5, 1e-10);
  add_check(rep, "luo violated", luo.satisfied ? 0.0 : 1.0, 1.0, 0.0);

  const BoundReport c2 = cor2(rho, a, b, ro);
  add_check(rep, "cor2 slack (equality)", c2.slack, 0.0, 1e-9);
  return rep;
}

}  // namespace opasym
