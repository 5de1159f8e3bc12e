// Acceptance run: one PASS/FAIL line per criterion on stdout, nonzero exit if
// any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "opasym/cli.hpp"
#include "opasym/dynamics.hpp"
#include "opasym/error.hpp"
#include "opasym/harness.hpp"
#include "opasym/io.hpp"
#include "opasym/random.hpp"
#include "support.hpp"

using namespace opasym;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void check_runtime(Outcome& o, double elapsed, double limit) {
  o.note("runtime " + fmt("%.2f", elapsed) + " s (limit " + fmt("%.0f", limit) + " s)");
  if (elapsed >= limit) o.fail("runtime limit exceeded");
}

void report_failures(Outcome& o, const ScenarioReport& r) {
  for (const ScenarioCheck& c : r.checks) {
    if (!c.pass) {
      o.fail(c.name + ": computed " + fmt("%.17g", c.computed) + " expected " +
             fmt("%.17g", c.expected));
    }
  }
}

// ---- 1 ---------------------------------------------------------------------

Outcome criterion_qubit() {
  Outcome o;
  const auto start = Clock::now();
  const std::vector<double> thetas{kPi / 12, kPi / 6, kPi / 4, kPi / 3, 5 * kPi / 12};
  const std::vector<Exponent> ps{1.0, 1.5, 2.0, 3.0, Exponent::infinity()};
  ComplexVector generic(2);
  generic << 0.8, Complex(0.36, 0.48);
  ComplexVector plus_y(2);
  plus_y << 1.0, Complex(0.0, 1.0);
  std::size_t n_checks = 0;
  for (const ComplexVector& v : {generic, plus_y}) {
    const ScenarioReport r = reproduce_qubit_example(thetas, ps, PureState::normalized(v));
    report_failures(o, r);
    n_checks += r.checks.size();
  }
  check_runtime(o, seconds_since(start), 1.0);
  o.note(std::to_string(n_checks) + " checks over 5 angles, 5 exponents, 2 states");
  return o;
}

// ---- 2 ---------------------------------------------------------------------

Outcome criterion_counterexample() {
  Outcome o;
  const auto start = Clock::now();
  const ScenarioReport r = reproduce_counterexample();
  report_failures(o, r);
  check_runtime(o, seconds_since(start), 1.0);
  o.note(std::to_string(r.checks.size()) + " checks");
  return o;
}

// ---- 3 ---------------------------------------------------------------------

struct SweepTally {
  std::size_t instances = 0;
  std::size_t violations = 0;
  std::size_t failures = 0;
  double worst = kInf;
};

void add(SweepTally& t, const SweepResult& r) {
  t.instances += r.n_instances;
  t.violations += r.n_violations;
  t.failures += r.n_failures;
  t.worst = std::min(t.worst, r.worst_slack);
}

// The state mix for mixed-state relations: full rank, low rank, pure.
struct Portion {
  StateKind kind;
  std::size_t n;
};

std::vector<Portion> state_mix(Relation rel, std::size_t n) {
  if (rel == Relation::cor1) return {{StateKind::haar_pure, n}};
  const std::size_t full = n * 4 / 10;
  const std::size_t low = n * 3 / 10;
  return {{StateKind::mixed_full_rank, full},
          {StateKind::mixed_low_rank, low},
          {StateKind::haar_pure, n - full - low}};
}

SweepTally run_family(Relation rel, std::size_t n_per_dim, const SweepExponents& ex,
                      double report_tol, std::uint64_t seed_base) {
  SweepTally tally;
  SweepOptions opts;
  opts.threads = worker_count();
  opts.relation.report_tol = report_tol;
  for (Index d = 2; d <= 8; ++d) {
    std::uint64_t part = 0;
    for (const Portion& portion : state_mix(rel, n_per_dim)) {
      EnsembleSpec spec;
      spec.dim = d;
      spec.state_kind = portion.kind;
      spec.rank = std::max<Index>(1, d / 2);
      spec.seed = seed_base + 1000 * static_cast<std::uint64_t>(d) + part++;
      add(tally, sweep(rel, spec, portion.n, ex, opts));
    }
  }
  return tally;
}

Outcome criterion_sweeps() {
  Outcome o;
  const auto start = Clock::now();
  const Relation p2[] = {Relation::thm1, Relation::thm2, Relation::cor1, Relation::cor2};
  std::uint64_t seed = 0x5eed0000;
  for (Relation rel : p2) {
    const SweepTally t = run_family(rel, 10000, {}, kReportTol, seed += 0x10000);
    std::string line = std::string(to_string(rel)) + " p=r=2: " + std::to_string(t.instances) +
                       " instances, " + std::to_string(t.violations) + " violations, worst slack " +
                       fmt("%.3g", t.worst);
    if (t.failures) line += ", " + std::to_string(t.failures) + " quarantined";
    o.note(line);
    if (t.violations) o.fail(std::string(to_string(rel)) + " violated at -1e-9");
    if (t.failures) o.fail(std::string(to_string(rel)) + " had numerical failures");
  }
  const std::pair<double, double> pairs[] = {{1.0, kInf}, {kInf, 1.0}, {1.5, 3.0}};
  for (Relation rel : {Relation::thm1, Relation::thm2, Relation::cor1}) {
    for (const auto& [p, r] : pairs) {
      SweepExponents ex{ConjugatePair(p), ConjugatePair(r)};
      const SweepTally t = run_family(rel, 100, ex, 1e-5, seed += 0x10000);
      const std::string tag = std::string(to_string(rel)) + " (p,r)=(" + Exponent(p).str() + "," +
                              Exponent(r).str() + ")";
      o.note(tag + ": " + std::to_string(t.instances) + " instances, " +
             std::to_string(t.violations) + " violations, worst slack " + fmt("%.3g", t.worst));
      if (t.violations) o.fail(tag + " violated at -1e-5");
      if (t.failures) o.fail(tag + " had numerical failures");
    }
  }
  check_runtime(o, seconds_since(start), 600.0);
  return o;
}

// ---- 4 ---------------------------------------------------------------------

Outcome criterion_pure_identity() {
  Outcome o;
  const double qs[] = {1.0, 1.5, 2.0, 4.0, kInf};
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Rng rng(instance_seed(0x1de7, static_cast<std::uint64_t>(i)));
    const Index d = 2 + i % 7;
    const PureState psi(testing::random_ket(d, rng));
    const Observable a(testing::random_hermitian(d, rng));
    const double q = qs[(i / 7) % 5];
    const auto [direct, from_variance] = pure_commutator_norm_identity(psi, a, q);
    worst = std::max(worst, std::abs(direct - from_variance));
    // Same identity with the norm taken from an SVD instead of the library.
    const ComplexMatrix c = psi.projector() * a.matrix() - a.matrix() * psi.projector();
    worst_oracle = std::max(worst_oracle, std::abs(testing::oracle_schatten(c, q) - from_variance));
  }
  o.note("1000 instances, max |lhs - 2^(1/q) dA| = " + fmt("%.3g", worst) + " (library), " +
         fmt("%.3g", worst_oracle) + " (SVD)");
  if (worst > 1e-9 || worst_oracle > 1e-9) o.fail("identity off by more than 1e-9");
  return o;
}

// ---- 5 ---------------------------------------------------------------------

Outcome criterion_oracle() {
  Outcome o;
  const auto start = Clock::now();
  double worst_p2 = 0.0;
  double worst_general = 0.0;
  int n_general = 0;
  int n_degenerate = 0;
  // Unanchored, so agreement is not inherited from starting at the pinching.
  OracleOptions oracle_opts;
  oracle_opts.anchor_at_pinching = false;
  for (int i = 0; i < 500; ++i) {
    Rng rng(instance_seed(0x0a11, static_cast<std::uint64_t>(i)));
    const Index d = 2 + i % 3;
    // Every fourth A has a repeated eigenvalue so non-trivial blocks occur.
    const bool degenerate = i % 4 == 3;
    RealVector ev(d);
    for (Index k = 0; k < d; ++k) ev(k) = rng.uniform(-1.0, 1.0);
    if (degenerate) ev(1) = ev(0);
    const Observable a(testing::with_spectrum(ev, rng));
    const Observable b(testing::random_hermitian(d, rng));
    n_degenerate += degenerate;

    oracle_opts.seed = instance_seed(0x0a12, static_cast<std::uint64_t>(i));
    const double closed = asymmetry_norm(b, a, 2.0).value;
    worst_p2 = std::max(worst_p2, std::abs(oracle_norm(b, a, 2.0, oracle_opts) - closed));

    // General exponents: d <= 3 with a simple spectrum, which keeps the oracle
    // on at most 3 parameters where its exhaustive search applies.
    if (d <= 3 && !degenerate) {
      for (Exponent p : {Exponent(1.0), Exponent::infinity()}) {
        const AsymmetryNormResult s = asymmetry_norm(b, a, p);
        const double ref = oracle_norm(b, a, p, oracle_opts);
        worst_general = std::max(worst_general, std::abs(s.value - ref));
        ++n_general;
      }
    }
  }
  o.note("500 pairs (" + std::to_string(n_degenerate) + " with a degenerate A), p=2 max |oracle - "
         "closed form| = " + fmt("%.3g", worst_p2));
  o.note(std::to_string(n_general) + " general-p comparisons at p in {1, inf}, max |solver - oracle| = " +
         fmt("%.3g", worst_general));
  if (worst_p2 > 1e-6) o.fail("p=2 oracle disagrees with the closed form beyond 1e-6");
  if (worst_general > 1e-5) o.fail("general-p solver disagrees with the oracle beyond 1e-5");
  o.note("runtime " + fmt("%.2f", seconds_since(start)) + " s");
  return o;
}

// ---- 6 ---------------------------------------------------------------------

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome criterion_qsl() {
  Outcome o;
  const auto start = Clock::now();
  constexpr int kPoints = 101;
  constexpr double kTMax = 5.0;
  constexpr double kStep = 1e-5;
  std::size_t violations = 0;
  std::size_t points = 0;
  double worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(instance_seed(0x9515, static_cast<std::uint64_t>(i)));
    const Index d = 2 + i % 7;
    const Observable h(testing::random_hermitian(d, rng));
    const Observable a(testing::random_hermitian(d, rng));
    const PureState psi0(testing::random_ket(d, rng));
    const Propagator prop(h);
    const QslNorms norms = qsl_norms(h, a);
    std::vector<double> v(kPoints), fd(kPoints);
    double vmax = 0.0;
    for (int k = 0; k < kPoints; ++k) {
      const double t = kTMax * k / (kPoints - 1);
      const PureState psi = prop(psi0, t);
      v[k] = signed_velocity(psi, h, a);
      fd[k] = (expectation(prop(psi0, t + kStep), a) - expectation(prop(psi0, t - kStep), a)) /
              (2.0 * kStep);
      const double speed = std::abs(v[k]);
      vmax = std::max(vmax, speed);
      if (speed > mt_bound(psi, h, a) + 1e-9) ++violations;
      if (speed > aur_qsl_bound(psi, h, a, norms) + 1e-9) ++violations;
      ++points;
    }
    // Relative to the trajectory's peak speed; pointwise ratios are
    // meaningless where the velocity crosses zero.
    for (int k = 0; k < kPoints; ++k) {
      worst_fd = std::max(worst_fd, std::abs(v[k] - fd[k]) / std::max(vmax, 1e-300));
    }
  }
  o.note("100 trajectories, " + std::to_string(points) + " points, " + std::to_string(violations) +
         " bound violations, max finite-difference error " + fmt("%.3g", worst_fd) +
         " relative to peak speed");
  if (violations) o.fail("a speed limit was violated");
  if (worst_fd > 1e-6) o.fail("velocity disagrees with the central difference beyond 1e-6");

  // Nearly conserved observables: the same 20 (H, V, A_diag, psi0) draws at
  // each epsilon, time points pooled per epsilon.
  const double eps[] = {1e-1, 1e-2, 1e-3};
  constexpr int kSpecs = 20;
  std::vector<double> log_eps, log_median;
  for (double e : eps) {
    std::vector<double> aur_all;
    std::size_t tighter = 0;
    std::size_t total = 0;
    for (int j = 0; j < kSpecs; ++j) {
      const std::uint64_t seed = instance_seed(0xe951, static_cast<std::uint64_t>(j));
      const NearlyConservedSpec spec = random_nearly_conserved(6, e, seed);
      Rng state_rng(instance_seed(0xe952, static_cast<std::uint64_t>(j)));
      const PureState psi0(testing::random_ket(6, state_rng));
      const Trajectory tr = run_trajectory(spec.h, spec.a, psi0, kTMax, kPoints);
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        aur_all.push_back(tr.aur_bound[k]);
        tighter += tr.aur_bound[k] < tr.mt_bound[k];
        ++total;
      }
    }
    const double med = median(aur_all);
    log_eps.push_back(std::log(e));
    log_median.push_back(std::log(med));
    const double frac = static_cast<double>(tighter) / static_cast<double>(total);
    o.note("eps " + fmt("%.0e", e) + ": median AUR " + fmt("%.4g", med) + ", tighter than MT at " +
           fmt("%.4f", frac));
    if (e <= 1e-2 && frac < 0.99) o.fail("AUR tighter than MT at < 99% of points for eps " + fmt("%.0e", e));
  }
  const double mx = (log_eps[0] + log_eps[1] + log_eps[2]) / 3.0;
  const double my = (log_median[0] + log_median[1] + log_median[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxy += (log_eps[k] - mx) * (log_median[k] - my);
    sxx += (log_eps[k] - mx) * (log_eps[k] - mx);
  }
  const double slope = sxy / sxx;
  o.note("log-log slope " + fmt("%.4f", slope));
  if (std::abs(slope - 1.0) > 0.1) o.fail("slope outside 1.0 +- 0.1");
  check_runtime(o, seconds_since(start), 120.0);
  return o;
}

// ---- 7 ---------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

Outcome criterion_determinism() {
  Outcome o;
  int compared = 0;
  const struct {
    Relation rel;
    StateKind kind;
    Index dim;
  } cases[] = {{Relation::thm1, StateKind::mixed_full_rank, 5},
               {Relation::thm2, StateKind::mixed_low_rank, 4},
               {Relation::cor1, StateKind::haar_pure, 3},
               {Relation::cor2, StateKind::mixed_full_rank, 6},
               {Relation::luo_historical, StateKind::mixed_full_rank, 2},
               {Relation::robertson, StateKind::haar_pure, 7}};
  for (const auto& c : cases) {
    EnsembleSpec spec;
    spec.dim = c.dim;
    spec.state_kind = c.kind;
    spec.rank = 2;
    spec.seed = 0xde7e;
    SweepOptions serial, parallel;
    parallel.threads = 4;
    const std::string first = io::sweep_csv(sweep(c.rel, spec, 300, {}, serial));
    const std::string again = io::sweep_csv(sweep(c.rel, spec, 300, {}, serial));
    const std::string threaded = io::sweep_csv(sweep(c.rel, spec, 300, {}, parallel));
    compared += 2;
    if (first != again) o.fail(std::string(to_string(c.rel)) + " differs between repeats");
    if (first != threaded) o.fail(std::string(to_string(c.rel)) + " differs across thread counts");
  }
  {
    SweepExponents ex{ConjugatePair(1.5), ConjugatePair(3.0)};
    EnsembleSpec spec;
    spec.dim = 3;
    spec.seed = 11;
    SweepOptions parallel;
    parallel.threads = 3;
    const std::string a = io::sweep_csv(sweep(Relation::thm1, spec, 20, ex));
    const std::string b = io::sweep_csv(sweep(Relation::thm1, spec, 20, ex, parallel));
    compared += 1;
    if (a != b) o.fail("general-exponent thm1 differs across thread counts");
  }
  // Through the CLI and the filesystem.
  const auto dir = std::filesystem::temp_directory_path() /
                   ("opasym_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::vector<std::string> contents;
  for (const char* threads : {"1", "1", "4"}) {
    const std::string path = (dir / ("run" + std::to_string(contents.size()) + ".csv")).string();
    const int code = run_cli({"sweep", "--relation", "thm2", "--dim", "4", "--n", "1000", "--seed",
                              "7", "--threads", threads, "--out", path, "--quiet"});
    if (code != 0) o.fail("cli sweep exited with " + std::to_string(code));
    contents.push_back(io::read_file(path));
  }
  std::filesystem::remove_all(dir);
  compared += 2;
  if (contents[0] != contents[1] || contents[0] != contents[2]) {
    o.fail("cli sweep files differ between runs");
  }
  o.note(std::to_string(compared) + " byte-level CSV comparisons");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"qubit analytic scenario", criterion_qubit},
      {"counterexample scenario", criterion_counterexample},
      {"theorem sweeps", criterion_sweeps},
      {"pure-state norm identity", criterion_pure_identity},
      {"pinching optimality oracle", criterion_oracle},
      {"QSL trajectories", criterion_qsl},
      {"determinism", criterion_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    all_pass = all_pass && o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", number,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
