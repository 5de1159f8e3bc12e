#include "opasym/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>

#include "CLI11.hpp"

namespace opasym::cli {

namespace {

constexpr std::string_view kHelpFooter =
    "Units: hbar = 1; observables and times are dimensionless.\n"
    "Matrix arguments take a JSON file {\"dim\", \"re\", \"im\"} or pauli:x|y|z|i.\n"
    "State arguments also take ket:0|1|+|-|+y|-y.\n"
    "Exit codes: 0 ok, 1 bound violated or scenario mismatch, 2 usage or input error,\n"
    "3 precondition or invariant violation, 4 internal error.";

struct Globals {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string out;
  bool quiet = false;
};

SolverOptions solver_options(const Globals& g, std::optional<double> cluster_tol, int max_iters,
                             const std::string& scheme) {
  SolverOptions o;
  o.tol = g.tol;
  o.cluster_tol = cluster_tol;
  o.max_iters = max_iters;
  o.scheme = scheme == "descent" ? SolverScheme::descent : SolverScheme::ellipsoid;
  return o;
}

void print(std::ostream& out, const io::Json& j) { out << j.dump() << '\n'; }

std::string require_out(const Globals& g, const char* command) {
  if (g.out.empty()) {
    throw opasym::Error(Errc::parse_error, std::string(command) + " requires --out");
  }
  return g.out;
}

ConjugatePair pair_from(const std::string& p, const std::string& q) {
  const Exponent pe = Exponent::parse(p);
  return q.empty() ? ConjugatePair(pe) : ConjugatePair(pe, Exponent::parse(q));
}

}  // namespace

Observable parse_observable_arg(const std::string& spec) {
  if (spec.rfind("pauli:", 0) == 0) {
    const std::string axis = spec.substr(6);
    if (axis.size() != 1 || std::string("xyzi").find(axis[0]) == std::string::npos) {
      throw opasym::Error(Errc::parse_error, "unknown Pauli shorthand '" + spec + "'");
    }
    return Observable::pauli(axis[0]);
  }
  return Observable(io::read_matrix_file(spec));
}

io::StateInput parse_state_arg(const std::string& spec) {
  if (spec.rfind("ket:", 0) == 0) {
    const std::string k = spec.substr(4);
    const double h = std::numbers::sqrt2 / 2;
    ComplexVector v(2);
    if (k == "0") v << 1.0, 0.0;
    else if (k == "1") v << 0.0, 1.0;
    else if (k == "+") v << h, h;
    else if (k == "-") v << h, -h;
    else if (k == "+y") v << h, Complex(0.0, h);
    else if (k == "-y") v << h, Complex(0.0, -h);
    else throw opasym::Error(Errc::parse_error, "unknown ket shorthand '" + spec + "'");
    PureState psi = PureState::normalized(v);
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    return io::StateInput{std::move(psi), std::move(rho)};
  }
  return io::read_state_file(spec);
}

namespace {

int cmd_norm(const Globals& g, const std::string& a_spec, const std::string& b_spec,
             const std::string& p, std::optional<double> cluster_tol, int max_iters,
             const std::string& scheme, std::ostream& out) {
  const Observable a = parse_observable_arg(a_spec);
  const Observable b = parse_observable_arg(b_spec);
  const Exponent pe = Exponent::parse(p);
  const AsymmetryNormResult r =
      asymmetry_norm(b, a, pe, solver_options(g, cluster_tol, max_iters, scheme));
  io::Json j = io::to_json(r);
  j["p"] = io::exponent_to_json(pe);
  if (!g.out.empty()) io::write_file_atomic(g.out, j.dump(2) + "\n");
  print(out, j);
  return kExitOk;
}

int cmd_bound(const Globals& g, const std::string& relation_name, const std::string& state_spec,
              const std::string& a_spec, const std::string& b_spec, const std::string& p,
              const std::string& q, const std::string& r, const std::string& s,
              const SolverOptions& solver, std::ostream& out) {
  const Relation rel = *parse_relation(relation_name);
  const io::StateInput st = parse_state_arg(state_spec);
  const Observable a = parse_observable_arg(a_spec);
  const Observable b = parse_observable_arg(b_spec);
  RelationOptions ro;
  ro.solver = solver;
  const ConjugatePair pq = pair_from(p, q);
  const ConjugatePair rs = pair_from(r, s);

  BoundReport rep;
  switch (rel) {
    case Relation::robertson:
      rep = st.pure ? robertson(*st.pure, a, b, ro) : robertson(st.rho, a, b, ro);
      break;
    case Relation::thm1: rep = thm1(st.rho, a, b, pq, rs, ro); break;
    case Relation::thm2: rep = thm2(st.rho, a, b, pq, rs, ro); break;
    case Relation::cor1:
      if (!st.pure) throw opasym::Error(Errc::not_pure, "cor1 requires a pure state");
      rep = cor1(*st.pure, a, b, pq, rs, ro);
      break;
    case Relation::cor2: rep = cor2(st.rho, a, b, ro); break;
    case Relation::luo_historical: rep = luo_historical(st.rho, a, b, ro); break;
    case Relation::holder_step: {
      const AsymmetryNormResult opt = asymmetry_norm(b, a, pq.p(), solver);
      rep = holder_step_check(st.rho, a, b, opt.optimizer, pq, ro);
      break;
    }
  }
  rep.meta.seed = std::nullopt;
  const io::Json j = io::to_json(rep);
  if (!g.out.empty()) {
    io::write_file_atomic(g.out, io::bound_csv_header() + "\n" + io::bound_csv_row(rep) + "\n");
  }
  print(out, j);
  return rep.satisfied ? kExitOk : kExitViolated;
}

int cmd_qsl(const Globals& g, const std::string& h_spec, const std::string& a_spec,
            const std::string& psi_spec, double t_max, int steps, const SolverOptions& solver,
            std::ostream& out) {
  const std::string path = require_out(g, "qsl");
  const Observable h = parse_observable_arg(h_spec);
  const Observable a = parse_observable_arg(a_spec);
  const io::StateInput st = parse_state_arg(psi_spec);
  if (!st.pure) throw opasym::Error(Errc::not_pure, "qsl requires a pure initial state");
  const Trajectory tr = run_trajectory(h, a, *st.pure, t_max, steps, solver);
  io::write_file_atomic(path, io::trajectory_csv(tr));

  std::size_t tighter = 0;
  double v_max = 0.0, mt_max = 0.0, aur_max = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.aur_bound[i] < tr.mt_bound[i]) ++tighter;
    v_max = std::max(v_max, tr.velocity[i]);
    mt_max = std::max(mt_max, tr.mt_bound[i]);
    aur_max = std::max(aur_max, tr.aur_bound[i]);
  }
  io::Json j;
  j["out"] = path;
  j["n_points"] = tr.times.size();
  j["t_max"] = t_max;
  j["norm_a_given_h"] = tr.norms.a_given_h;
  j["norm_h_given_a"] = tr.norms.h_given_a;
  j["fraction_aur_tighter"] =
      static_cast<double>(tighter) / static_cast<double>(tr.times.size());
  j["max_velocity"] = v_max;
  j["max_mt_bound"] = mt_max;
  j["max_aur_bound"] = aur_max;
  print(out, j);
  return kExitOk;
}

struct SweepArgs {
  std::string relation;
  Index dim = 2;
  std::size_t n = 1000;
  std::string state_kind;
  Index rank = 1;
  std::string observable_kind = "gaussian_hermitian";
  double lambda_min = -1.0;
  double lambda_max = 1.0;
  bool commuting = false;
  std::string p = "2", q, r = "2", s;
  unsigned threads = 1;
  std::string summary;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, const SolverOptions& solver,
              std::ostream& out) {
  const std::string path = require_out(g, "sweep");
  const Relation rel = *parse_relation(a.relation);
  EnsembleSpec spec;
  spec.dim = a.dim;
  spec.seed = g.seed;
  const std::string sk =
      a.state_kind.empty() ? (rel == Relation::cor1 ? "haar_pure" : "mixed_full_rank") : a.state_kind;
  spec.state_kind = *parse_state_kind(sk);
  spec.rank = a.rank;
  spec.observable_kind = *parse_observable_kind(a.observable_kind);
  spec.lambda_min = a.lambda_min;
  spec.lambda_max = a.lambda_max;
  spec.commuting_pair = a.commuting;

  SweepOptions opts;
  opts.relation.solver = solver;
  opts.threads = a.threads;
  const SweepExponents ex{pair_from(a.p, a.q), pair_from(a.r, a.s)};
  const SweepResult res = sweep(rel, spec, a.n, ex, opts);

  io::write_file_atomic(path, io::sweep_csv(res));
  io::Json j = io::to_json(res);
  j["csv"] = path;
  const bool expected_invalid = rel == Relation::luo_historical;
  if (expected_invalid) {
    j["note"] = "luo_historical is not a valid inequality; violations are expected";
  }
  const std::string summary_path = a.summary.empty() ? path + ".json" : a.summary;
  j["summary"] = summary_path;
  io::write_file_atomic(summary_path, j.dump(2) + "\n");
  print(out, j);
  return (res.n_violations == 0 || expected_invalid) ? kExitOk : kExitViolated;
}

int cmd_reproduce(const Globals& g, const std::string& scenario, const std::string& psi_spec,
                  const SolverOptions& solver, std::ostream& out) {
  ScenarioReport rep;
  if (scenario == "qubit") {
    const io::StateInput st = parse_state_arg(psi_spec);
    if (!st.pure) throw opasym::Error(Errc::not_pure, "qubit scenario needs a pure state");
    const double pi = std::numbers::pi;
    rep = reproduce_qubit_example({pi / 12, pi / 6, pi / 4, pi / 3, 5 * pi / 12},
                                  {1.0, 1.5, 2.0, 3.0, Exponent::infinity()}, *st.pure, solver);
  } else {
    rep = reproduce_counterexample(solver);
  }
  io::Json j = io::to_json(rep);
  if (!g.out.empty()) {
    const std::filesystem::path dir(g.out);
    std::filesystem::create_directories(dir);
    io::write_file_atomic(dir / (scenario + "_checks.csv"), io::scenario_checks_csv(rep));
    if (!rep.qubit_rows.empty()) {
      io::write_file_atomic(dir / (scenario + "_table.csv"), io::qubit_rows_csv(rep));
    }
    io::write_file_atomic(dir / (scenario + ".json"), j.dump(2) + "\n");
    j["out"] = dir.string();
  }
  print(out, j);
  return rep.all_pass() ? kExitOk : kExitViolated;
}

void error_json(std::ostream& out, std::string_view code, const std::string& message) {
  io::Json j;
  j["error"] = std::string(code);
  j["message"] = message;
  print(out, j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator asymmetry norms and asymmetry-bounded uncertainty relations", "opasym"};
  app.footer(std::string(kHelpFooter));
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Base seed for random ensembles")->capture_default_str();
  app.add_option("--tol", g.tol, "Relative solver tolerance for general exponents")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (directory for reproduce)");
  app.add_flag("--quiet", g.quiet, "Suppress diagnostics on stderr");

  std::optional<double> cluster_tol;
  int max_iters = 100000;
  std::string scheme = "ellipsoid";
  const auto add_solver_flags = [&](CLI::App* sc) {
    sc->add_option("--cluster-tol", cluster_tol,
                   "Eigenvalue clustering tolerance (default 1e-8 max(1, spectral range))");
    sc->add_option("--max-iters", max_iters, "Solver iteration cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sc->add_option("--scheme", scheme, "General-exponent solver")
        ->capture_default_str()
        ->check(CLI::IsMember({"ellipsoid", "descent"}));
  };
  const std::vector<std::string> relation_names{"robertson", "thm1", "cor1", "thm2",
                                                "cor2", "luo", "luo_historical", "holder_step"};

  // norm
  CLI::App* norm = app.add_subcommand("norm", "Asymmetry norm N_p(B|A)")->fallthrough();
  std::string a_spec, b_spec, p = "2";
  norm->add_option("A", a_spec, "Observable defining the commutant")->required();
  norm->add_option("B", b_spec, "Observable whose asymmetry is measured")->required();
  norm->add_option("--p", p, "Schatten exponent in [1, inf]")->capture_default_str();
  add_solver_flags(norm);

  // bound
  CLI::App* bound = app.add_subcommand("bound", "Evaluate one uncertainty relation")->fallthrough();
  std::string relation, state_spec, q, r = "2", s;
  bound->add_option("relation", relation, "robertson, thm1, cor1, thm2, cor2, luo, holder_step")
      ->required()
      ->check(CLI::IsMember(relation_names));
  bound->add_option("state", state_spec, "State file or ket shorthand")->required();
  bound->add_option("A", a_spec, "First observable")->required();
  bound->add_option("B", b_spec, "Second observable")->required();
  bound->add_option("--p", p, "Exponent p of N_p(B|A)")->capture_default_str();
  bound->add_option("--q", q, "Conjugate of p (default 1/p + 1/q = 1)");
  bound->add_option("--r", r, "Exponent r of N_r(A|B)")->capture_default_str();
  bound->add_option("--s", s, "Conjugate of r");
  add_solver_flags(bound);

  // qsl
  CLI::App* qsl = app.add_subcommand("qsl", "Trajectory with both speed limits")->fallthrough();
  std::string h_spec, psi_spec;
  double t_max = std::numbers::pi;
  int steps = 101;
  qsl->add_option("H", h_spec, "Hamiltonian")->required();
  qsl->add_option("A", a_spec, "Observable")->required();
  qsl->add_option("psi0", psi_spec, "Initial pure state")->required();
  qsl->add_option("--t-max", t_max, "Final time")->capture_default_str()->check(
      CLI::PositiveNumber);
  qsl->add_option("--steps", steps, "Number of grid points (>= 2)")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));
  add_solver_flags(qsl);

  // sweep
  CLI::App* sw = app.add_subcommand("sweep", "Random-instance sweep of one relation")->fallthrough();
  SweepArgs sa;
  sw->add_option("--relation", sa.relation, "Relation name")
      ->required()
      ->check(CLI::IsMember(relation_names));
  sw->add_option("--dim", sa.dim, "Hilbert space dimension")->capture_default_str()->check(
      CLI::Range(2, 64));
  sw->add_option("--n", sa.n, "Number of instances")->capture_default_str()->check(
      CLI::PositiveNumber);
  sw->add_option("--state-kind", sa.state_kind,
                 "haar_pure, mixed_full_rank or mixed_low_rank (default haar_pure for cor1, "
                 "mixed_full_rank otherwise)")
      ->check(CLI::IsMember({"haar_pure", "mixed_full_rank", "mixed_low_rank"}));
  sw->add_option("--rank", sa.rank, "Rank for mixed_low_rank")->capture_default_str();
  sw->add_option("--observable-kind", sa.observable_kind, "Observable ensemble")
      ->capture_default_str()
      ->check(CLI::IsMember({"gaussian_hermitian", "pauli_combination", "bounded_spectrum"}));
  sw->add_option("--lambda-min", sa.lambda_min, "bounded_spectrum lower edge")->capture_default_str();
  sw->add_option("--lambda-max", sa.lambda_max, "bounded_spectrum upper edge")->capture_default_str();
  sw->add_flag("--commuting", sa.commuting, "Draw B as a polynomial in A");
  sw->add_option("--p", sa.p, "Exponent p")->capture_default_str();
  sw->add_option("--q", sa.q, "Conjugate of p");
  sw->add_option("--r", sa.r, "Exponent r")->capture_default_str();
  sw->add_option("--s", sa.s, "Conjugate of r");
  sw->add_option("--threads", sa.threads, "Worker threads")->capture_default_str()->check(
      CLI::Range(1u, 256u));
  sw->add_option("--summary", sa.summary, "Summary JSON path (default <out>.json)");
  add_solver_flags(sw);

  // reproduce
  CLI::App* rp = app.add_subcommand("reproduce", "Closed-form scenarios")->fallthrough();
  std::string scenario, rp_psi = "ket:+y";
  rp->add_option("--scenario", scenario, "qubit or counterexample")
      ->required()
      ->check(CLI::IsMember({"qubit", "counterexample"}));
  rp->add_option("--psi", rp_psi, "Qubit scenario state")->capture_default_str();
  add_solver_flags(rp);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("opasym");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (!g.quiet) app.exit(e, err, err);
    error_json(out, "UsageError", e.what());
    return kExitUsage;
  }

  try {
    const SolverOptions solver = solver_options(g, cluster_tol, max_iters, scheme);
    if (*norm) return cmd_norm(g, a_spec, b_spec, p, cluster_tol, max_iters, scheme, out);
    if (*bound) return cmd_bound(g, relation, state_spec, a_spec, b_spec, p, q, r, s, solver, out);
    if (*qsl) return cmd_qsl(g, h_spec, a_spec, psi_spec, t_max, steps, solver, out);
    if (*sw) return cmd_sweep(g, sa, solver, out);
    if (*rp) return cmd_reproduce(g, scenario, rp_psi, solver, out);
  } catch (const opasym::Error& e) {
    if (!g.quiet) err << "opasym: " << e.what() << '\n';
    error_json(out, to_string(e.code()), e.what());
    const bool usage = e.code() == Errc::parse_error || e.code() == Errc::io_error;
    return usage ? kExitUsage : kExitInvariant;
  } catch (const std::exception& e) {
    if (!g.quiet) err << "opasym: internal error: " << e.what() << '\n';
    error_json(out, "InternalError", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace opasym::cli
