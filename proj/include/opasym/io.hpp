#pragma once

// File formats. Matrices are JSON objects with exactly the keys "dim", "re"
// and "im" (dim x dim nested arrays). State files use the same layout, or 1-D
// "re"/"im" arrays of length dim for a ket. Reals in CSV are printed with
// %.17g so every value round-trips.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "opasym/commutant.hpp"
#include "opasym/dynamics.hpp"
#include "opasym/harness.hpp"
#include "opasym/relations.hpp"

namespace opasym::io {

using Json = nlohmann::ordered_json;

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double v);

/// Throws parse_error on malformed documents (wrong keys, shapes, types).
ComplexMatrix matrix_from_json(const Json& doc);
Json matrix_to_json(const ComplexMatrix& m);

ComplexMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m);

struct StateInput {
  std::optional<PureState> pure;  // set for ket files and rank-one matrices
  DensityMatrix rho;
};

StateInput state_from_json(const Json& doc);
StateInput read_state_file(const std::filesystem::path& path);

Json exponent_to_json(Exponent p);

Json to_json(const AsymmetryNormResult& r);
Json to_json(const BoundReport& r);
Json to_json(const ScenarioReport& r);
/// Summary only; rows go to the CSV.
Json to_json(const SweepResult& r);

/// relation,dim,p,q,r,s,lhs,rhs,slack,refinement,satisfied,seed
std::string bound_csv_header();
std::string bound_csv_row(const BoundReport& r);
/// Header plus one row per instance in index order; quarantined instances
/// keep their row with empty numeric fields and satisfied = "failed".
std::string sweep_csv(const SweepResult& r);

/// t,expval_A,velocity,mt_bound,aur_bound
std::string trajectory_csv(const Trajectory& t);

/// One row per qubit-scenario evaluation.
std::string qubit_rows_csv(const ScenarioReport& r);
std::string scenario_checks_csv(const ScenarioReport& r);

/// Writes to a sibling temporary file and renames it over `path`. Throws
/// io_error.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace opasym::io
