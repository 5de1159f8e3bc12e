#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>

#include "opasym/commutant.hpp"
#include "opasym/dynamics.hpp"
#include "opasym/error.hpp"
#include "opasym/harness.hpp"
#include "opasym/io.hpp"
#include "opasym/relations.hpp"

namespace py = pybind11;
using namespace opasym;

namespace {

// A 1-D array is a ket, a 2-D array a density matrix.
using StateArg = std::variant<ComplexVector, ComplexMatrix>;

DensityMatrix as_rho(const StateArg& s) {
  if (const auto* v = std::get_if<ComplexVector>(&s)) return DensityMatrix::from_pure(PureState(*v));
  return DensityMatrix(std::get<ComplexMatrix>(s));
}

PureState as_pure(const StateArg& s) {
  if (const auto* v = std::get_if<ComplexVector>(&s)) return PureState(*v);
  return DensityMatrix(std::get<ComplexMatrix>(s)).to_pure();
}

SolverOptions solver_options(const std::string& scheme, double tol, int max_iters,
                             std::optional<double> cluster_tol, bool force_iterative) {
  SolverOptions o;
  if (scheme == "ellipsoid") {
    o.scheme = SolverScheme::ellipsoid;
  } else if (scheme == "descent") {
    o.scheme = SolverScheme::descent;
  } else {
    throw Error(Errc::invalid_spec, "scheme must be 'ellipsoid' or 'descent'");
  }
  o.tol = tol;
  o.max_iters = max_iters;
  o.cluster_tol = cluster_tol;
  o.force_iterative = force_iterative;
  return o;
}

Relation relation_arg(const std::string& name) {
  const auto r = parse_relation(name);
  if (!r) throw Error(Errc::invalid_spec, "unknown relation '" + name + "'");
  return *r;
}

// Structured results cross the boundary as JSON text, decoded on the Python
// side, so both front ends share one serialisation.
std::string dump(const io::Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_opasym, m) {
  m.doc() = "Operator asymmetry norms and asymmetry-bounded uncertainty relations";

  // Messages start with the error code, e.g. "NotHermitian: ...".
  py::register_exception<Error>(m, "OpasymError", PyExc_ValueError);

  m.def("schatten_norm", [](const ComplexMatrix& x, double p) { return schatten_norm(x, p); },
        py::arg("x"), py::arg("p"));
  m.def("pinch", [](const ComplexMatrix& b, const ComplexMatrix& a) {
          return pinch(b, spectral_blocks(Observable(a)));
        },
        py::arg("b"), py::arg("a"));

  m.def("asymmetry_norm",
        [](const ComplexMatrix& b, const ComplexMatrix& a, double p, const std::string& scheme,
           double tol, int max_iters, std::optional<double> cluster_tol, bool force_iterative) {
          const AsymmetryNormResult r =
              asymmetry_norm(Observable(b), Observable(a), p,
                             solver_options(scheme, tol, max_iters, cluster_tol, force_iterative));
          py::dict out;
          out["value"] = r.value;
          out["method"] = std::string(to_string(r.method));
          out["iterations"] = r.iterations;
          out["converged"] = r.converged;
          out["lower_bound"] = r.lower_bound;
          out["optimizer"] = r.optimizer;
          return out;
        },
        py::arg("b"), py::arg("a"), py::arg("p") = 2.0, py::arg("scheme") = "ellipsoid",
        py::arg("tol") = 1e-9, py::arg("max_iters") = 100000, py::arg("cluster_tol") = py::none(),
        py::arg("force_iterative") = false);

  m.def("oracle_norm",
        [](const ComplexMatrix& b, const ComplexMatrix& a, double p, bool anchor) {
          OracleOptions o;
          o.anchor_at_pinching = anchor;
          return oracle_norm(Observable(b), Observable(a), p, o);
        },
        py::arg("b"), py::arg("a"), py::arg("p"), py::arg("anchor_at_pinching") = true);

  m.def("variance", [](const StateArg& s, const ComplexMatrix& a) {
          return variance(as_rho(s), Observable(a));
        },
        py::arg("state"), py::arg("a"));
  m.def("wysi", [](const StateArg& s, const ComplexMatrix& a) { return wysi(as_rho(s), Observable(a)); },
        py::arg("state"), py::arg("a"));
  m.def("pure_commutator_norm_identity",
        [](const ComplexVector& psi, const ComplexMatrix& a, double q) {
          return pure_commutator_norm_identity(PureState(psi), Observable(a), q);
        },
        py::arg("psi"), py::arg("a"), py::arg("q"));

  m.def("bound_json",
        [](const std::string& relation, const StateArg& s, const ComplexMatrix& a,
           const ComplexMatrix& b, double p, double r, double report_tol) {
          const Observable oa(a), ob(b);
          RelationOptions ro;
          ro.report_tol = report_tol;
          const ConjugatePair pq(p), rs(r);
          BoundReport rep;
          switch (relation_arg(relation)) {
            case Relation::robertson: rep = robertson(as_rho(s), oa, ob, ro); break;
            case Relation::thm1: rep = thm1(as_rho(s), oa, ob, pq, rs, ro); break;
            case Relation::cor1: rep = cor1(as_pure(s), oa, ob, pq, rs, ro); break;
            case Relation::thm2: rep = thm2(as_rho(s), oa, ob, pq, rs, ro); break;
            case Relation::cor2: rep = cor2(as_rho(s), oa, ob, ro); break;
            case Relation::luo_historical: rep = luo_historical(as_rho(s), oa, ob, ro); break;
            case Relation::holder_step:
              throw Error(Errc::invalid_spec, "holder_step needs an explicit A_d");
          }
          return dump(io::to_json(rep));
        },
        py::arg("relation"), py::arg("state"), py::arg("a"), py::arg("b"), py::arg("p") = 2.0,
        py::arg("r") = 2.0, py::arg("report_tol") = kReportTol);

  m.def("propagate", [](const ComplexMatrix& h, const ComplexVector& psi0, double t) {
          return ComplexVector(propagate(Observable(h), PureState(psi0), t).amplitudes());
        },
        py::arg("h"), py::arg("psi0"), py::arg("t"));
  m.def("velocity", [](const ComplexVector& psi, const ComplexMatrix& h, const ComplexMatrix& a) {
          return velocity(PureState(psi), Observable(h), Observable(a));
        },
        py::arg("psi"), py::arg("h"), py::arg("a"));
  m.def("mt_bound", [](const ComplexVector& psi, const ComplexMatrix& h, const ComplexMatrix& a) {
          return mt_bound(PureState(psi), Observable(h), Observable(a));
        },
        py::arg("psi"), py::arg("h"), py::arg("a"));
  m.def("aur_qsl_bound",
        [](const ComplexVector& psi, const ComplexMatrix& h, const ComplexMatrix& a) {
          return aur_qsl_bound(PureState(psi), Observable(h), Observable(a));
        },
        py::arg("psi"), py::arg("h"), py::arg("a"));
  m.def("trajectory",
        [](const ComplexMatrix& h, const ComplexMatrix& a, const ComplexVector& psi0, double t_max,
           int steps) {
          const Trajectory t = run_trajectory(Observable(h), Observable(a), PureState(psi0), t_max, steps);
          py::dict out;
          out["t"] = t.times;
          out["expval_A"] = t.expectation_a;
          out["velocity"] = t.velocity;
          out["mt_bound"] = t.mt_bound;
          out["aur_bound"] = t.aur_bound;
          out["norm_a_given_h"] = t.norms.a_given_h;
          out["norm_h_given_a"] = t.norms.h_given_a;
          return out;
        },
        py::arg("h"), py::arg("a"), py::arg("psi0"), py::arg("t_max") = 3.141592653589793,
        py::arg("steps") = 101);

  m.def("sweep",
        [](const std::string& relation, Index dim, std::size_t n, std::uint64_t seed,
           const std::string& state_kind, Index rank, double p, double r, unsigned threads,
           bool commuting) {
          EnsembleSpec spec;
          spec.dim = dim;
          spec.seed = seed;
          spec.rank = rank;
          spec.commuting_pair = commuting;
          const auto kind = parse_state_kind(state_kind);
          if (!kind) throw Error(Errc::invalid_spec, "unknown state kind '" + state_kind + "'");
          spec.state_kind = *kind;
          SweepOptions opts;
          opts.threads = threads;
          const SweepResult res =
              sweep(relation_arg(relation), spec, n, {ConjugatePair(p), ConjugatePair(r)}, opts);
          return py::make_tuple(dump(io::to_json(res)), io::sweep_csv(res));
        },
        py::arg("relation"), py::arg("dim"), py::arg("n"), py::arg("seed") = 0,
        py::arg("state_kind") = "mixed_full_rank", py::arg("rank") = 1, py::arg("p") = 2.0,
        py::arg("r") = 2.0, py::arg("threads") = 1, py::arg("commuting") = false);

  m.def("reproduce_json", [](const std::string& scenario) {
          if (scenario == "counterexample") return dump(io::to_json(reproduce_counterexample()));
          if (scenario != "qubit") throw Error(Errc::invalid_spec, "unknown scenario '" + scenario + "'");
          const double pi = 3.141592653589793;
          ComplexVector plus_y(2);
          plus_y << 1.0, Complex(0.0, 1.0);
          return dump(io::to_json(reproduce_qubit_example(
              {pi / 12, pi / 6, pi / 4, pi / 3, 5 * pi / 12},
              {1.0, 1.5, 2.0, 3.0, Exponent::infinity()}, PureState::normalized(plus_y))));
        },
        py::arg("scenario"));
}
