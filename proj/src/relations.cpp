#include "opasym/relations.hpp"

#include <array>
#include <cmath>

namespace opasym {

namespace {

void finish(BoundReport& r, const RelationOptions& opts) {
  r.slack = r.lhs - r.rhs;
  r.satisfied = r.slack >= -opts.report_tol;
}

double clamp_tiny_negative(double v) { return (v < 0.0 && v >= -1e-12) ? 0.0 : v; }

struct NormPair {
  double b_given_a;
  double a_given_b;
  bool degenerate;
};

NormPair both_norms(const Observable& a, const Observable& b, Exponent p, Exponent r,
                    const RelationOptions& opts) {
  NormPair n{};
  n.b_given_a = asymmetry_norm(b, a, p, opts.solver).value;
  n.a_given_b = asymmetry_norm(a, b, r, opts.solver).value;
  n.degenerate = n.b_given_a <= kDegenerateNormTol || n.a_given_b <= kDegenerateNormTol;
  return n;
}

// |trace| / (N N) with the 0/0 convention for commuting pairs. A vanishing norm
// forces [A, B] = 0 and hence a vanishing trace; anything else is a defect.
double ratio_or_zero(double numerator, double trace_abs, const NormPair& n) {
  if (n.degenerate) {
    if (trace_abs > 1e-9) {
      throw Error(Errc::numerical, "asymmetry norm vanishes but |Tr(. C)| = " +
                                       std::to_string(trace_abs));
    }
    return 0.0;
  }
  return numerator / (n.b_given_a * n.a_given_b);
}

void stamp(ReportMeta& m, Index dim, ConjugatePair pq, ConjugatePair rs, const NormPair& n) {
  m.dim = dim;
  m.p = pq.p();
  m.q = pq.q();
  m.r = rs.p();
  m.s = rs.q();
  m.degenerate = n.degenerate;
  m.norm_b_given_a = n.b_given_a;
  m.norm_a_given_b = n.a_given_b;
}

BoundReport general_aur(Relation which, const ComplexMatrix& state_like, Index dim,
                        const Observable& a, const Observable& b, ConjugatePair pq,
                        ConjugatePair rs, const RelationOptions& opts) {
  BoundReport rep;
  rep.relation = which;
  const ComplexMatrix ca = commutator(state_like, a.matrix());
  const ComplexMatrix cb = commutator(state_like, b.matrix());
  rep.lhs = schatten_norm(ca, pq.q()) * schatten_norm(cb, rs.q());
  const Observable c = commutator_c(a, b);
  const double t = std::abs(trace_product(state_like, c.matrix()));
  const NormPair n = both_norms(a, b, pq.p(), rs.p(), opts);
  rep.rhs = ratio_or_zero(t * t, t, n);
  stamp(rep.meta, dim, pq, rs, n);
  finish(rep, opts);
  return rep;
}

}  // namespace

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::robertson: return "robertson";
    case Relation::thm1: return "thm1";
    case Relation::cor1: return "cor1";
    case Relation::thm2: return "thm2";
    case Relation::cor2: return "cor2";
    case Relation::luo_historical: return "luo_historical";
    case Relation::holder_step: return "holder_step";
  }
  return "unknown";
}

std::optional<Relation> parse_relation(std::string_view name) noexcept {
  static constexpr std::array all{Relation::robertson, Relation::thm1,           Relation::cor1,
                                  Relation::thm2,      Relation::cor2,           Relation::luo_historical,
                                  Relation::holder_step};
  if (name == "luo") return Relation::luo_historical;
  for (Relation r : all) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

ConjugatePair::ConjugatePair(Exponent p, Exponent q) : p_(p), q_(q) {
  if (std::abs(p.reciprocal() + q.reciprocal() - 1.0) > 1e-12) {
    throw Error(Errc::invalid_exponent, "exponents " + p.str() + " and " + q.str() +
                                            " are not conjugate");
  }
}

double variance(const PureState& psi, const Observable& a) {
  require_same_dim(psi.dim(), a.dim(), "variance");
  const double mean = expectation(psi, a);
  const ComplexVector w = a.matrix() * psi.amplitudes() - mean * psi.amplitudes();
  return clamp_tiny_negative(w.squaredNorm());
}

double variance(const DensityMatrix& rho, const Observable& a) {
  require_same_dim(rho.dim(), a.dim(), "variance");
  const double mean = expectation(rho, a);
  ComplexMatrix centred = a.matrix();
  centred.diagonal().array() -= mean;
  return clamp_tiny_negative(trace_product(rho.matrix(), centred * centred).real());
}

double wysi(const DensityMatrix& rho, const Observable& a) {
  require_same_dim(rho.dim(), a.dim(), "wysi");
  const ComplexMatrix k = commutator(matrix_sqrt(rho), a.matrix());
  return 0.5 * k.squaredNorm();
}

BoundReport robertson(const PureState& psi, const Observable& a, const Observable& b,
                      const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "robertson");
  BoundReport rep;
  rep.relation = Relation::robertson;
  rep.lhs = std::sqrt(variance(psi, a) * variance(psi, b));
  rep.rhs = 0.5 * std::abs(expectation(psi, commutator_c(a, b)));
  rep.meta.dim = a.dim();
  finish(rep, opts);
  return rep;
}

BoundReport robertson(const DensityMatrix& rho, const Observable& a, const Observable& b,
                      const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "robertson");
  BoundReport rep;
  rep.relation = Relation::robertson;
  rep.lhs = std::sqrt(variance(rho, a) * variance(rho, b));
  rep.rhs = 0.5 * std::abs(expectation(rho, commutator_c(a, b)));
  rep.meta.dim = a.dim();
  finish(rep, opts);
  return rep;
}

BoundReport holder_step_check(const DensityMatrix& rho, const Observable& a, const Observable& b,
                              const ComplexMatrix& a_d, ConjugatePair pq,
                              const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "holder_step_check");
  require_same_dim(a.dim(), a_d.rows(), "holder_step_check");
  require_same_dim(rho.dim(), a.dim(), "holder_step_check");
  const Exponent inf = Exponent::infinity();
  const double ad_norm = schatten_norm(a_d, inf);
  if (ad_norm > 0.0) {
    const double comm = schatten_norm(commutator(a.matrix(), a_d), inf);
    if (comm > 1e-8 * schatten_norm(a.matrix(), inf) * ad_norm) {
      throw Error(Errc::not_in_commutant, "||[A, A_d]|| = " + std::to_string(comm));
    }
  }
  BoundReport rep;
  rep.relation = Relation::holder_step;
  rep.lhs = schatten_norm(b.matrix() - a_d, pq.p()) *
            schatten_norm(commutator(rho.matrix(), a.matrix()), pq.q());
  rep.rhs = std::abs(expectation(rho, commutator_c(a, b)));
  rep.meta.dim = a.dim();
  rep.meta.p = pq.p();
  rep.meta.q = pq.q();
  finish(rep, opts);
  return rep;
}

BoundReport thm1(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "thm1");
  require_same_dim(rho.dim(), a.dim(), "thm1");
  return general_aur(Relation::thm1, rho.matrix(), a.dim(), a, b, pq, rs, opts);
}

BoundReport thm2(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "thm2");
  require_same_dim(rho.dim(), a.dim(), "thm2");
  return general_aur(Relation::thm2, matrix_sqrt(rho), a.dim(), a, b, pq, rs, opts);
}

BoundReport cor1(const PureState& psi, const Observable& a, const Observable& b,
                 ConjugatePair pq, ConjugatePair rs, const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "cor1");
  require_same_dim(psi.dim(), a.dim(), "cor1");
  BoundReport rep;
  rep.relation = Relation::cor1;
  rep.lhs = std::sqrt(variance(psi, a) * variance(psi, b));
  const double c = std::abs(expectation(psi, commutator_c(a, b)));
  const NormPair n = both_norms(a, b, pq.p(), rs.p(), opts);
  const double prefactor = std::pow(2.0, 1.0 - (pq.q().reciprocal() + rs.q().reciprocal()));
  const double refinement = prefactor * ratio_or_zero(c, c, n);
  rep.refinement = refinement;
  rep.rhs = 0.5 * c * refinement;
  stamp(rep.meta, a.dim(), pq, rs, n);
  finish(rep, opts);
  return rep;
}

std::pair<double, double> pure_commutator_norm_identity(const PureState& psi, const Observable& a,
                                                        Exponent q) {
  require_same_dim(psi.dim(), a.dim(), "pure_commutator_norm_identity");
  const double direct = schatten_norm(commutator(psi.projector(), a.matrix()), q);
  const double from_variance = std::pow(2.0, q.reciprocal()) * std::sqrt(variance(psi, a));
  return {direct, from_variance};
}

BoundReport cor2(const DensityMatrix& rho, const Observable& a, const Observable& b,
                 const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "cor2");
  require_same_dim(rho.dim(), a.dim(), "cor2");
  BoundReport rep;
  rep.relation = Relation::cor2;
  const ComplexMatrix root = matrix_sqrt(rho);
  const double ia = 0.5 * commutator(root, a.matrix()).squaredNorm();
  const double ib = 0.5 * commutator(root, b.matrix()).squaredNorm();
  rep.lhs = std::sqrt(ia * ib);
  const double t = std::abs(trace_product(root, commutator_c(a, b).matrix()));
  const ConjugatePair two(2.0);
  const NormPair n = both_norms(a, b, 2.0, 2.0, opts);
  const double refinement = ratio_or_zero(t, t, n);
  rep.refinement = refinement;
  rep.rhs = 0.5 * t * refinement;
  stamp(rep.meta, a.dim(), two, two, n);
  finish(rep, opts);
  return rep;
}

BoundReport luo_historical(const DensityMatrix& rho, const Observable& a, const Observable& b,
                           const RelationOptions& opts) {
  require_same_dim(a.dim(), b.dim(), "luo_historical");
  require_same_dim(rho.dim(), a.dim(), "luo_historical");
  BoundReport rep;
  rep.relation = Relation::luo_historical;
  rep.lhs = std::sqrt(wysi(rho, a) * wysi(rho, b));
  rep.rhs = 0.5 * std::abs(expectation(rho, commutator_c(a, b)));
  rep.meta.dim = a.dim();
  finish(rep, opts);
  return rep;
}

}  // namespace opasym
