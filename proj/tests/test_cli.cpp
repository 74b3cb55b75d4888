#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  json j() const { return json::parse(out); }
};

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path tmp = fs::temp_directory_path() / ("thetalab_cli_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter++) + ".out");
  const std::string cmd = std::string(THETALAB_CLI) + " " + args + " > " + tmp.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(tmp);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string data(const std::string& name) { return std::string(THETALAB_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("fqm info") {
  Run r = run("fqm info --lattice " + data("u4.json"));
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(j["order"] == 4);
  CHECK(j["signature"] == json({2, 1}));
  CHECK(j["q_table"][1]["q"] == "1/8");
}

TEST_CASE("fqm weil relations and a word") {
  Run r = run("fqm weil --lattice " + data("u4.json") + " --word STs");
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(j["relations"]["S2"].get<double>() < 1e-12);
  CHECK(j["matrix"].size() == 4);
}

TEST_CASE("the pairing of Delta with E4^2 E6 / Delta^2 vanishes") {
  Run r = run("pair --g " + data("delta.json") + " --f " + data("e42e6_dd.json"));
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(std::abs(j["value"]["re"].get<double>()) < 1e-6);
  CHECK(std::abs(j["value"]["im"].get<double>()) < 1e-6);
}

TEST_CASE("fock verify exit codes") {
  Run ok = run("fock verify --sig 2,2 --identity ddc");
  CHECK(ok.code == 0);
  CHECK(ok.j()["pass"] == true);
  CHECK(run("fock verify --sig 2,1 --identity ddc").code == 2);
  CHECK(run("fock verify --sig 2 --identity closed").code == 2);
}

TEST_CASE("theta eval carries build and config") {
  Run r = run("theta eval --lattice " + data("uu.json") + " --phi phi0 --tau 0.1,1.0 --point " + data("pt.json"));
  REQUIRE(r.code == 0);
  json j = r.j();
  CHECK(j["kind"] == "theta");
  CHECK(j.contains("build"));
  CHECK(j["config"]["tol"].get<double>() == 1e-8);
  CHECK(j["components"][0]["values"][0]["re"].get<double>() >= 1.0);
}

TEST_CASE("lift eval matches the log model and refuses the diagonal") {
  Run r = run("lift eval --lattice " + data("uu.json") + " --f " + data("j.json") + " --kernel phi0 --point " +
              data("pt.json"));
  REQUIRE(r.code == 0);
  // -4 log|j(0.1+1.3i) - j(-0.2+0.9i)|, mpmath
  CHECK(std::abs(r.j()["components"][0]["re"].get<double>() - (-32.3123024978505296)) < 1e-5);
  Run s = run("lift eval --lattice " + data("uu.json") + " --f " + data("j.json") + " --kernel phi0 --point " +
              data("diag.json"));
  CHECK(s.code == 2);
  json e = s.j();
  CHECK(e["error"]["kind"] == "singular_locus");
  CHECK(e["report"]["entries"].size() == 2);
}

TEST_CASE("lift scan writes a CSV with a -4 log t fit") {
  const fs::path csv = fs::temp_directory_path() / ("thetalab_scan_" + std::to_string(::getpid()) + ".csv");
  Run r = run("lift scan --geodesic " + data("geo.json") + " --samples 8 --out " + csv.string());
  REQUIRE(r.code == 0);
  json fit = r.j()["fit"];
  CHECK(std::abs(fit["c2"].get<double>() + 4.0) < 0.2);
  CHECK(fit["r2"].get<double>() > 0.999);
  std::ifstream in(csv);
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "t,value,error");
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 8);
  fs::remove(csv);
}

TEST_CASE("malformed input and usage errors exit with 2") {
  Run bad = run("fqm info --lattice " + data("bad.json"));
  CHECK(bad.code == 2);
  CHECK(bad.j()["error"]["kind"] == "format");
  CHECK(run("fqm info --lattice /nonexistent.json").code == 2);
  CHECK(run("theta eval --lattice " + data("uu.json") + " --phi nope --tau 0,1 --point " + data("pt.json")).code == 2);
  CHECK(run("theta eval --lattice " + data("uu.json") + " --phi phi0 --tau 0,-1 --point " + data("pt.json")).code == 2);
}

TEST_CASE("verify quick") {
  Run r = run("verify --level quick");
  CHECK(r.code == 0);
  json j = r.j();
  CHECK(j["pass"] == true);
}
