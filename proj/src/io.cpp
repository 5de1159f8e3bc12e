#include "opasym/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace opasym::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(Errc::parse_error, what); }

double number_at(const Json& v, const char* where) {
  if (!v.is_number()) parse_fail(std::string(where) + ": expected a number");
  return v.get<double>();
}

RealVector vector_from(const Json& arr, Index dim, const char* key) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != dim) {
    parse_fail(std::string("'") + key + "' must be an array of length " + std::to_string(dim));
  }
  RealVector out(dim);
  for (Index i = 0; i < dim; ++i) out(i) = number_at(arr[static_cast<std::size_t>(i)], key);
  return out;
}

Eigen::MatrixXd matrix_from(const Json& arr, Index dim, const char* key) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != dim) {
    parse_fail(std::string("'") + key + "' must have " + std::to_string(dim) + " rows");
  }
  Eigen::MatrixXd out(dim, dim);
  for (Index i = 0; i < dim; ++i) out.row(i) = vector_from(arr[static_cast<std::size_t>(i)], dim, key);
  return out;
}

// Validates the {"dim", "re", "im"} envelope and returns dim.
Index envelope(const Json& doc) {
  if (!doc.is_object()) parse_fail("matrix document must be a JSON object");
  if (doc.size() != 3 || !doc.contains("dim") || !doc.contains("re") || !doc.contains("im")) {
    parse_fail("matrix document must have exactly the keys dim, re, im");
  }
  const Json& d = doc["dim"];
  if (!d.is_number_integer() || d.get<long long>() < 1) {
    parse_fail("'dim' must be a positive integer");
  }
  return static_cast<Index>(d.get<long long>());
}

bool is_flat(const Json& arr) { return arr.is_array() && (arr.empty() || !arr.front().is_array()); }

std::string opt_exponent(const std::optional<Exponent>& e) { return e ? e->str() : std::string(); }

Json opt_exponent_json(const std::optional<Exponent>& e) {
  return e ? exponent_to_json(*e) : Json(nullptr);
}

Json opt_real(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ComplexMatrix matrix_from_json(const Json& doc) {
  const Index dim = envelope(doc);
  const Eigen::MatrixXd re = matrix_from(doc["re"], dim, "re");
  const Eigen::MatrixXd im = matrix_from(doc["im"], dim, "im");
  ComplexMatrix m(dim, dim);
  m.real() = re;
  m.imag() = im;
  return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(Errc::not_square, "matrix_to_json needs a square matrix");
  Json re = Json::array();
  Json im = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  Json doc;
  doc["dim"] = m.rows();
  doc["re"] = std::move(re);
  doc["im"] = std::move(im);
  return doc;
}

namespace {

Json parse_document(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

}  // namespace

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(parse_document(path));
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
  write_file_atomic(path, matrix_to_json(m).dump(2) + "\n");
}

StateInput state_from_json(const Json& doc) {
  const Index dim = envelope(doc);
  if (is_flat(doc["re"]) && is_flat(doc["im"])) {
    const RealVector re = vector_from(doc["re"], dim, "re");
    const RealVector im = vector_from(doc["im"], dim, "im");
    ComplexVector v(dim);
    v.real() = re;
    v.imag() = im;
    PureState psi(std::move(v));
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    return StateInput{std::move(psi), std::move(rho)};
  }
  DensityMatrix rho(matrix_from_json(doc));
  std::optional<PureState> psi;
  if (rho.is_pure()) psi = rho.to_pure();
  return StateInput{std::move(psi), std::move(rho)};
}

StateInput read_state_file(const std::filesystem::path& path) {
  return state_from_json(parse_document(path));
}

Json exponent_to_json(Exponent p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

Json to_json(const AsymmetryNormResult& r) {
  Json j;
  j["value"] = r.value;
  j["method"] = std::string(to_string(r.method));
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["lower_bound"] = r.lower_bound;
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["relation"] = std::string(to_string(r.relation));
  j["dim"] = r.meta.dim;
  j["p"] = opt_exponent_json(r.meta.p);
  j["q"] = opt_exponent_json(r.meta.q);
  j["r"] = opt_exponent_json(r.meta.r);
  j["s"] = opt_exponent_json(r.meta.s);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["refinement"] = opt_real(r.refinement);
  j["satisfied"] = r.satisfied;
  j["seed"] = r.meta.seed ? Json(*r.meta.seed) : Json(nullptr);
  j["degenerate"] = r.meta.degenerate;
  j["norm_b_given_a"] = opt_real(r.meta.norm_b_given_a);
  j["norm_a_given_b"] = opt_real(r.meta.norm_a_given_b);
  return j;
}

Json to_json(const ScenarioReport& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["all_pass"] = r.all_pass();
  Json checks = Json::array();
  for (const ScenarioCheck& c : r.checks) {
    Json cj;
    cj["name"] = c.name;
    cj["computed"] = c.computed;
    cj["expected"] = c.expected;
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

Json to_json(const SweepResult& r) {
  Json j;
  j["relation"] = std::string(to_string(r.relation));
  Json e;
  e["dim"] = r.spec.dim;
  e["state_kind"] = std::string(to_string(r.spec.state_kind));
  if (r.spec.state_kind == StateKind::mixed_low_rank) e["rank"] = r.spec.rank;
  e["observable_kind"] = std::string(to_string(r.spec.observable_kind));
  if (r.spec.observable_kind == ObservableKind::bounded_spectrum) {
    e["lambda_min"] = r.spec.lambda_min;
    e["lambda_max"] = r.spec.lambda_max;
  }
  e["commuting_pair"] = r.spec.commuting_pair;
  e["seed"] = r.spec.seed;
  j["ensemble"] = std::move(e);
  const bool uses_exponents = r.relation == Relation::thm1 || r.relation == Relation::thm2 ||
                              r.relation == Relation::cor1 || r.relation == Relation::holder_step;
  Json ex;
  ex["p"] = exponent_to_json(r.exponents.pq.p());
  ex["q"] = exponent_to_json(r.exponents.pq.q());
  ex["r"] = exponent_to_json(r.exponents.rs.p());
  ex["s"] = exponent_to_json(r.exponents.rs.q());
  j["exponents"] = uses_exponents ? std::move(ex) : Json(nullptr);
  j["n_instances"] = r.n_instances;
  j["n_violations"] = r.n_violations;
  j["n_failures"] = r.n_failures;
  j["n_degenerate"] = r.n_degenerate;
  j["worst_slack"] = std::isfinite(r.worst_slack) ? Json(r.worst_slack) : Json(nullptr);
  Json hist;
  const auto& labels = slack_bucket_labels();
  for (std::size_t k = 0; k < kSlackBuckets; ++k) hist[std::string(labels[k])] = r.slack_histogram[k];
  j["slack_histogram"] = std::move(hist);
  if (r.refinement) {
    Json st;
    st["min"] = r.refinement->min;
    st["median"] = r.refinement->median;
    st["max"] = r.refinement->max;
    st["count"] = r.refinement->count;
    j["refinement_stats"] = std::move(st);
  } else {
    j["refinement_stats"] = nullptr;
  }
  j["elapsed_seconds"] = r.elapsed_seconds;
  Json failures = Json::array();
  for (const SweepRow& row : r.rows) {
    if (row.report) continue;
    Json f;
    f["index"] = row.index;
    f["seed"] = row.seed;
    f["error"] = row.failure;
    failures.push_back(std::move(f));
  }
  j["failures"] = std::move(failures);
  return j;
}

std::string bound_csv_header() { return "relation,dim,p,q,r,s,lhs,rhs,slack,refinement,satisfied,seed"; }

std::string bound_csv_row(const BoundReport& r) {
  std::string row;
  row += to_string(r.relation);
  row += ',' + std::to_string(r.meta.dim);
  row += ',' + opt_exponent(r.meta.p);
  row += ',' + opt_exponent(r.meta.q);
  row += ',' + opt_exponent(r.meta.r);
  row += ',' + opt_exponent(r.meta.s);
  row += ',' + format_real(r.lhs);
  row += ',' + format_real(r.rhs);
  row += ',' + format_real(r.slack);
  row += ',' + (r.refinement ? format_real(*r.refinement) : std::string());
  row += r.satisfied ? ",true" : ",false";
  row += ',' + (r.meta.seed ? std::to_string(*r.meta.seed) : std::string());
  return row;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out = bound_csv_header() + "\n";
  for (const SweepRow& row : r.rows) {
    if (row.report) {
      out += bound_csv_row(*row.report);
    } else {
      out += std::string(to_string(r.relation)) + ',' + std::to_string(r.spec.dim) +
             ",,,,,,,,,failed," + std::to_string(row.seed);
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "t,expval_A,velocity,mt_bound,aur_bound\n";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    out += format_real(t.times[i]) + ',' + format_real(t.expectation_a[i]) + ',' +
           format_real(t.velocity[i]) + ',' + format_real(t.mt_bound[i]) + ',' +
           format_real(t.aur_bound[i]) + '\n';
  }
  return out;
}

std::string qubit_rows_csv(const ScenarioReport& r) {
  std::string out =
      "theta,p,r,norm_b_given_a,norm_expected_p,norm_a_given_b,norm_expected_r,refinement,"
      "refinement_expected,aur_rhs,aur_rhs_expected,robertson_rhs,robertson_rhs_expected\n";
  for (const QubitRow& q : r.qubit_rows) {
    const double st = std::sin(q.theta);
    out += format_real(q.theta) + ',' + q.p.str() + ',' + q.r.str() + ',' +
           format_real(q.norm_b_given_a) + ',' + format_real(q.norm_expected_p) + ',' +
           format_real(q.norm_a_given_b) + ',' + format_real(q.norm_expected_r) + ',' +
           format_real(q.refinement) + ',' + format_real(q.refinement_expected) + ',' +
           format_real(q.aur_rhs) + ',' + format_real(q.sigma_y * q.sigma_y) + ',' +
           format_real(q.robertson_rhs) + ',' + format_real(std::abs(q.sigma_y) * st) + '\n';
  }
  return out;
}

std::string scenario_checks_csv(const ScenarioReport& r) {
  std::string out = "check,computed,expected,tolerance,pass\n";
  for (const ScenarioCheck& c : r.checks) {
    out += '"' + c.name + "\"," + format_real(c.computed) + ',' + format_real(c.expected) + ',' +
           format_real(c.tolerance) + (c.pass ? ",true\n" : ",false\n");
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::io_error, "cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ignore;
      std::filesystem::remove(tmp, ignore);
      throw Error(Errc::io_error, "write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    std::filesystem::remove(tmp, ignore);
    throw Error(Errc::io_error, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace opasym::io
