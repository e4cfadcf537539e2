#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "spinsq/criteria.hpp"
#include "spinsq/io.hpp"
#include "spinsq/models.hpp"

using namespace spinsq;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("spinsq_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd =
      env + " '" + SPINSQ_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> /dev/null";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

DensityOperator singlet() {
  Vector psi = Vector::Zero(4);
  psi[1] = 1.0 / std::sqrt(2.0);
  psi[2] = -1.0 / std::sqrt(2.0);
  return DensityOperator::pure(psi, {2, 2});
}

}  // namespace

TEST_CASE("help exits cleanly") { CHECK(run("--help").code == 0); }

TEST_CASE("check on a singlet") {
  const auto file = write_file("singlet.json", qstate_json(singlet()).dump());
  const Run r = run("check '" + file.string() + "'");
  REQUIRE(r.code == 0);
  const Json reports = Json::parse(r.out);
  bool seen = false;
  for (const auto& e : reports) {
    if (e["criterion_id"] == "OSSI-8b") {
      seen = true;
      CHECK(e["margin"].get<double>() == doctest::Approx(-1.0));
      CHECK(e["violated"].get<bool>());
    }
  }
  CHECK(seen);
}

TEST_CASE("check output equals the library evaluation") {
  oracle::Rng rng(3);
  const DensityOperator rho(ComplexOperator::qubits(oracle::random_density(8, 2, rng)));
  const auto file = write_file("random.json", qstate_json(rho).dump());
  const Run r = run("check '" + file.string() + "'");
  REQUIRE(r.code == 0);
  const Json got = Json::parse(r.out);
  const auto want = evaluate_all(rho);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got[i]["criterion_id"] == want[i].criterion_id);
    CHECK(got[i]["violated"].get<bool>() == want[i].violated);
    if (!got[i]["margin"].is_null()) {
      CHECK(got[i]["margin"].get<double>() == doctest::Approx(want[i].margin).epsilon(1e-12));
    }
  }

  // Moments input goes through the same evaluation.
  const auto mfile = write_file("moments.json", moments_json(moments(rho)).dump());
  const Run m = run("check '" + mfile.string() + "'");
  REQUIRE(m.code == 0);
  const Json from_moments = Json::parse(m.out);
  CHECK(from_moments[1]["margin"].get<double>() ==
        doctest::Approx(got[1]["margin"].get<double>()).epsilon(1e-12));
}

TEST_CASE("moments round trip") {
  const auto rho = dicke_state(3, 1);
  const auto file = write_file("dicke.json", qstate_json(rho).dump());
  const Run r = run("moments '" + file.string() + "'");
  REQUIRE(r.code == 0);
  const auto m = read_moments(Json::parse(r.out));
  const auto want = moments(rho);
  CHECK((m.j() - want.j()).norm() < 1e-12);
  CHECK((m.c() - want.c()).cwiseAbs().maxCoeff() < 1e-12);

  const auto back = read_qstate(Json::parse(qstate_json(rho).dump()));
  CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampling is reproducible") {
  const Run a = run("sample --n 6 --count 200 --seed 17 --law aligned");
  const Run b = run("sample --n 6 --count 200 --seed 17 --law aligned");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("k2x,k2y,k2z,jx,jy,jz\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 201);
  CHECK(run("sample --n 6 --count 200 --seed 18 --law aligned").out != a.out);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("tc --model heisenberg_chain --n 3 --detector OSSI-99").code == 2);
  CHECK(run("tc --model potts --n 3 --detector OSSI-8b").code == 2);
  CHECK(run("tc --model ising_transverse --n 3 --param B --detector OSSI-8c").code == 2);
  CHECK(run("sample --n 4 --count 0").code == 2);
  CHECK(run("check '" + (scratch() / "missing.json").string() + "'").code == 2);
  const auto bad = write_file("bad.json", "{\"re\": [[1, 0], [0, 0.5]], \"im\": [[0, 0], [0, 0]]}");
  CHECK(run("check '" + bad.string() + "'").code == 2);
  CHECK(run("tc --model heisenberg_chain --n 6 --detector OSSI-8b", "SPINSQ_MAX_QUBITS=4").code ==
        3);
}

TEST_CASE("single critical temperature") {
  const Run r = run("tc --model heisenberg_chain --n 3 --detector OSSI-8b --format json");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  REQUIRE(j.size() == 1);
  CHECK(j[0]["status"] == "found");
  CHECK(j[0]["t_c"].get<double>() == doctest::Approx(5.46).epsilon(0.01 / 5.46));
}

TEST_CASE("table restricted to one size") {
  const Run r = run("table2 --n 4");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "model,n,detector,t_c,bracket_lo,bracket_hi,scan_validated");
  std::getline(in, line);
  CHECK(line.rfind("heisenberg_chain,4,OSSI-8b,", 0) == 0);
  const double tc = std::stod(line.substr(std::string("heisenberg_chain,4,OSSI-8b,").size()));
  CHECK(tc == doctest::Approx(5.77).epsilon(0.01 / 5.77));
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 13);
}

TEST_CASE("polytope output") {
  const Run j = run("polytope --n 10 --j 0 0 0");
  REQUIRE(j.code == 0);
  const Json g = Json::parse(j.out);
  CHECK(g["vertices"].size() == 6);
  const Run obj = run("polytope --n 10 --j 0 0 0 --format obj");
  REQUIRE(obj.code == 0);
  CHECK(std::count(obj.out.begin(), obj.out.end(), 'v') >= 6);
  CHECK(run("polytope --n 4 --j 0 0 3").code == 2);
}

TEST_CASE("bound scan") {
  const Run r = run("bound-scan --model heisenberg_chain --n 5 --tmin 5.3 --tmax 5.3 --steps 1");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("true,true,true") != std::string::npos);
}
