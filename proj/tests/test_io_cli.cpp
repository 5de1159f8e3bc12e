#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "opasym/cli.hpp"
#include "opasym/error.hpp"
#include "opasym/io.hpp"
#include "opasym/random.hpp"
#include "support.hpp"

using namespace opasym;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = 0;
  io::Json out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = cli::run(args, out, err);
  r.err = err.str();
  // Exactly one JSON object on stdout.
  const std::string text = out.str();
  r.out = io::Json::parse(text);
  REQUIRE(r.out.is_object());
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("opasym_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string counterexample_rho(const TempDir& dir) {
  const std::string p = dir / "rho.json";
  write_text(p, R"({"dim":2,"re":[[0.75,0],[0,0.25]],"im":[[0,0],[0,0]]})");
  return p;
}

}  // namespace

TEST_CASE("matrix files round-trip") {
  Rng rng(31);
  TempDir dir;
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix m = testing::random_hermitian(2 + trial, rng) / 3.0;
    const std::string p = dir / ("m" + std::to_string(trial) + ".json");
    io::write_matrix_file(p, m);
    const ComplexMatrix back = io::read_matrix_file(p);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
    // A second write reproduces the file byte for byte.
    const std::string first = io::read_file(p);
    io::write_matrix_file(p, back);
    CHECK(io::read_file(p) == first);
  }
  for (const auto& entry : fs::directory_iterator(dir.path())) {
    CHECK(entry.path().extension() == ".json");
  }
}

TEST_CASE("malformed matrix documents are rejected") {
  const char* bad[] = {
      R"({"dim":2,"re":[[1,0],[0,1]]})",
      R"({"dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]],"extra":1})",
      R"({"dim":2,"re":[[1,0,0],[0,1,0]],"im":[[0,0],[0,0]]})",
      R"({"dim":3,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})",
      R"({"dim":2,"re":[[1,"x"],[0,1]],"im":[[0,0],[0,0]]})",
      R"([1,2,3])",
  };
  for (const char* doc : bad) {
    CHECK_THROWS_AS(io::matrix_from_json(io::Json::parse(doc)), Error);
  }
  CHECK_THROWS_AS(io::read_matrix_file("/nonexistent/opasym.json"), Error);
}

TEST_CASE("state documents") {
  const io::StateInput ket = io::state_from_json(
      io::Json::parse(R"({"dim":2,"re":[0.6,0],"im":[0,0.8]})"));
  REQUIRE(ket.pure.has_value());
  CHECK(ket.pure->amplitudes()(1) == Complex(0.0, 0.8));
  const io::StateInput proj = io::state_from_json(
      io::Json::parse(R"({"dim":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]})"));
  CHECK(proj.pure.has_value());
  const io::StateInput mixed = io::state_from_json(
      io::Json::parse(R"({"dim":2,"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]})"));
  CHECK_FALSE(mixed.pure.has_value());
  CHECK_THROWS_AS(io::state_from_json(io::Json::parse(R"({"dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]})")),
                  Error);
}

TEST_CASE("CSV layouts") {
  CHECK(io::bound_csv_header() == "relation,dim,p,q,r,s,lhs,rhs,slack,refinement,satisfied,seed");
  CHECK(io::format_real(0.1) == "0.10000000000000001");
  CHECK(io::format_real(std::numeric_limits<double>::infinity()) == "inf");
  const Trajectory tr = run_trajectory(Observable::pauli('z'), Observable::pauli('x'),
                                       PureState::normalized(ComplexVector::Ones(2)), 1.0, 3);
  const std::string csv = io::trajectory_csv(tr);
  CHECK(csv.rfind("t,expval_A,velocity,mt_bound,aur_bound\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("atomic writes leave no temporary files") {
  TempDir dir;
  io::write_file_atomic(dir / "a.txt", "one");
  io::write_file_atomic(dir / "a.txt", "two");
  CHECK(io::read_file(dir / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir.path()), fs::directory_iterator{}) == 1);
  CHECK_THROWS_AS(io::write_file_atomic("/nonexistent/dir/a.txt", "x"), Error);
}

TEST_CASE("cli norm") {
  RunResult r = run({"norm", "pauli:x", "pauli:y", "--p", "2"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["value"].get<double>() == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
  for (const char* key : {"value", "method", "iterations", "converged"}) CHECK(r.out.contains(key));

  r = run({"norm", "pauli:z", "pauli:z"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["value"].get<double>() <= 1e-12);

  r = run({"norm", "pauli:x", "pauli:y", "--p", "inf"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  r = run({"norm", "pauli:x", "pauli:y", "--p", "0.5"});
  CHECK(r.code == cli::kExitInvariant);
  CHECK(r.out["error"] == "InvalidExponent");
  CHECK_FALSE(r.err.empty());

  TempDir dir;
  write_text(dir / "bad.json", "{not json");
  r = run({"norm", dir / "bad.json", "pauli:x"});
  CHECK(r.code == cli::kExitUsage);
  write_text(dir / "nh.json", R"({"dim":2,"re":[[0,1],[0,0]],"im":[[0,0],[0,0]]})");
  r = run({"norm", dir / "nh.json", "pauli:x"});
  CHECK(r.code == cli::kExitInvariant);
  CHECK(r.out["error"] == "NotHermitian");
  r = run({"norm", "pauli:x", "pauli:y", "--bogus"});
  CHECK(r.code == cli::kExitUsage);
  r = run({"--quiet", "norm", "pauli:x", "pauli:w"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.empty());
}

TEST_CASE("cli bound") {
  TempDir dir;
  const std::string rho = counterexample_rho(dir);
  RunResult r = run({"bound", "cor2", rho, "pauli:x", "pauli:y"});
  CHECK(r.code == cli::kExitOk);
  CHECK(std::abs(r.out["slack"].get<double>()) <= 1e-9);

  r = run({"bound", "luo", rho, "pauli:x", "pauli:y"});
  CHECK(r.code == cli::kExitViolated);
  CHECK(r.out["satisfied"] == false);

  r = run({"bound", "cor1", rho, "pauli:x", "pauli:y"});
  CHECK(r.code == cli::kExitInvariant);

  r = run({"bound", "cor1", "ket:+y", "pauli:z", "pauli:x", "--p", "1"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["lhs"].get<double>() == doctest::Approx(1.0));
  CHECK(r.out["rhs"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));

  r = run({"bound", "robertson", "ket:+y", "pauli:z", "pauli:x"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["rhs"].get<double>() == doctest::Approx(1.0));

  r = run({"bound", "thm9", rho, "pauli:x", "pauli:y"});
  CHECK(r.code == cli::kExitUsage);
  r = run({"bound", "thm1", rho, "pauli:x", "pauli:y", "--p", "2", "--q", "3"});
  CHECK(r.code == cli::kExitInvariant);
}

TEST_CASE("cli qsl") {
  TempDir dir;
  RunResult r = run({"qsl", "pauli:z", "pauli:x", "ket:+", "--out", dir / "t.csv"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.contains("fraction_aur_tighter"));
  std::istringstream csv(io::read_file(dir / "t.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,expval_A,velocity,mt_bound,aur_bound");
  int rows = 0;
  while (std::getline(csv, line)) {
    const double t = std::stod(line.substr(0, line.find(',')));
    const double ev = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(ev - std::cos(2.0 * t)) <= 1e-9);
    ++rows;
  }
  CHECK(rows == 101);

  // A conserved observable does not move and its asymmetry bound vanishes.
  r = run({"qsl", "pauli:z", "pauli:z", "ket:+", "--out", dir / "c.csv"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["max_velocity"].get<double>() == 0.0);
  CHECK(r.out["max_aur_bound"].get<double>() == 0.0);

  r = run({"qsl", "pauli:z", "pauli:x", "ket:+"});
  CHECK(r.code == cli::kExitUsage);
  r = run({"qsl", "pauli:z", "pauli:x", "ket:+", "--steps", "1", "--out", dir / "t.csv"});
  CHECK(r.code != cli::kExitOk);
}

TEST_CASE("cli sweep") {
  TempDir dir;
  RunResult a = run({"--seed", "7", "sweep", "--relation", "thm2", "--dim", "4", "--n", "200",
                     "--out", dir / "a.csv"});
  RunResult b = run({"sweep", "--relation", "thm2", "--dim", "4", "--n", "200", "--seed", "7",
                     "--threads", "3", "--out", dir / "b.csv"});
  CHECK(a.code == cli::kExitOk);
  CHECK(b.code == cli::kExitOk);
  CHECK(io::read_file(dir / "a.csv") == io::read_file(dir / "b.csv"));
  CHECK(a.out["n_violations"] == 0);
  CHECK(io::Json::parse(io::read_file(dir / "a.csv.json"))["n_instances"] == 200);

  RunResult luo = run({"sweep", "--relation", "luo", "--dim", "2", "--n", "500", "--out",
                       dir / "l.csv", "--summary", dir / "l.json"});
  CHECK(luo.code == cli::kExitOk);
  CHECK(luo.out["n_violations"].get<int>() > 0);
  CHECK(luo.out.contains("note"));
  CHECK(fs::exists(dir / "l.json"));

  CHECK(run({"sweep", "--relation", "cor2", "--dim", "3", "--n", "10"}).code == cli::kExitUsage);
  CHECK(run({"sweep", "--relation", "cor1", "--dim", "3", "--n", "10", "--state-kind",
             "mixed_full_rank", "--out", dir / "x.csv"})
            .code == cli::kExitInvariant);
  // cor1 defaults to Haar-pure states.
  CHECK(run({"sweep", "--relation", "cor1", "--dim", "3", "--n", "10", "--out", dir / "x.csv"})
            .code == cli::kExitOk);
}

TEST_CASE("cli reproduce") {
  TempDir dir;
  RunResult r = run({"reproduce", "--scenario", "counterexample", "--out", dir / "rep"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out["all_pass"] == true);
  const std::string checks = io::read_file(dir / "rep/counterexample_checks.csv");
  CHECK(checks.find("cor2 slack (equality)") != std::string::npos);

  r = run({"reproduce", "--scenario", "qubit", "--out", dir / "rep"});
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(dir / "rep/qubit_table.csv"));

  r = run({"reproduce", "--scenario", "nope"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
}
