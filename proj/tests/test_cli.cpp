#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "tractlab/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path freshDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("tractlab_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(std::initializer_list<std::string> args) {
  return tractlab::cli::run(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("render: smoke run writes image, sidecar and manifest") {
  fs::path dir = freshDir("render");
  int rc = run({"render", "--model", "exp", "--R", "1", "--window",
                "-2,2,-2,2", "--res", "64x64", "--seed", "1", "-o",
                dir.string()});
  CHECK(rc == 0);
  std::string ppm = slurp(dir / "image.ppm");
  CHECK(ppm.rfind("P6\n64 64\n255\n", 0) == 0);
  CHECK(ppm.size() == 13 + 64 * 64 * 3);
  json sidecar = json::parse(slurp(dir / "image.json"));
  CHECK(sidecar["histogram"].is_object());
  json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "render");
  CHECK(manifest.contains("generated_at"));
}

TEST_CASE("render: preset reproduces the pinned classifications") {
  fs::path dir = freshDir("preset");
  int rc = run({"render", "--preset", "fig2-mid", "-o", dir.string()});
  CHECK(rc == 0);
  json sidecar = json::parse(slurp(dir / "image.json"));
  CHECK(sidecar["histogram"]["Basin"].get<std::uint64_t>() > 0);
  CHECK(sidecar["histogram"]["EscapingInTract"].get<std::uint64_t>() > 0);
  CHECK(sidecar["model"] == "gamma_shift1");
}

TEST_CASE("render: orbit dump with a fast-escape report") {
  fs::path dir = freshDir("orbit");
  int rc = run({"render", "--model", "exp", "--R", "1", "--window",
                "-8,8,-8,8", "--res", "64x65", "--seed", "3", "--orbit", "5",
                "--rho", "1", "--depth", "3", "-o", dir.string()});
  CHECK(rc == 0);
  json orbit = json::parse(slurp(dir / "orbit.json"));
  CHECK(orbit["classification"] == "EscapingInTract");
  CHECK(orbit["fast_escape"]["passed"] == true);
  CHECK(orbit["fast_escape"]["depth_checked"] == 3);
  CHECK(orbit["iterates"].size() >= 2);
}

TEST_CASE("render: unknown preset and bad flags exit nonzero") {
  CHECK(run({"render", "--preset", "nope"}) == 5);
  CHECK(run({"render", "--res", "banana"}) == 2);
  CHECK(run({"nonsense"}) == 2);
}

TEST_CASE("growth: CSV profile is deterministic and a(r) is sane") {
  fs::path dirA = freshDir("growthA");
  fs::path dirB = freshDir("growthB");
  for (const auto& dir : {dirA, dirB}) {
    int rc = run({"growth", "--model", "exp", "--R", "1", "--rmin", "5",
                  "--rmax", "40", "--res", "400x400", "-o", dir.string()});
    REQUIRE(rc == 0);
  }
  std::string csvA = slurp(dirA / "profile.csv");
  CHECK(csvA == slurp(dirB / "profile.csv"));
  CHECK(slurp(dirA / "summary.json") == slurp(dirB / "summary.json"));
  CHECK(slurp(dirA / "profile.json") == slurp(dirB / "profile.json"));
  CHECK(json::parse(slurp(dirA / "profile.json")).is_array());

  // a/r within 1% on every row
  std::istringstream rows(csvA);
  std::string line;
  std::getline(rows, line);
  CHECK(line == "r,B,a,re_zr,im_zr,exceptional");
  int checked = 0;
  while (std::getline(rows, line)) {
    double r = 0, B = 0, a = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r, &B, &a) != 3) continue;
    CHECK(std::abs(a / r - 1.0) <= 0.01);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("growth: single-radius profile leaves the a column empty") {
  fs::path dir = freshDir("growth1");
  int rc = run({"growth", "--model", "exp", "--R", "1", "--rmin", "5",
                "--rmax", "5", "--res", "256x256", "-o", dir.string()});
  CHECK(rc == 0);
  std::string csv = slurp(dir / "profile.csv");
  std::istringstream rows(csv);
  std::string header, row;
  std::getline(rows, header);
  REQUIRE(std::getline(rows, row));
  // r,B,,re,im,flag: the a field between the 2nd and 3rd comma is empty
  std::size_t c1 = row.find(',');
  std::size_t c2 = row.find(',', c1 + 1);
  std::size_t c3 = row.find(',', c2 + 1);
  CHECK(c3 == c2 + 1);
}

TEST_CASE("growth: example1 smoke profile exits cleanly") {
  fs::path dir = freshDir("growthex1");
  int rc = run({"growth", "--model", "example1", "--lambda", "1", "--R", "20",
                "--rmin", "3", "--rmax", "12", "--res", "400x400", "-o",
                dir.string()});
  CHECK(rc == 0);
  json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary["samples"].get<int>() > 3);
}

TEST_CASE("growth: unmeetable tract maps to exit 3") {
  CHECK(run({"growth", "--model", "exp", "--R", "1e300", "--rmin", "5",
             "--rmax", "10", "--res", "64x64"}) == 3);
}

TEST_CASE("ode-bound: verdicts with exact rationals") {
  fs::path dir = freshDir("ode");
  int rc = run({"ode-bound", "f'' - z*f", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "ode_bound.json"));
  CHECK(out["verdict"] == "Bound");
  CHECK(out["bound"] == "1/2");
  CHECK(out["kappaCandidates"][0] == "3/2");

  rc = run({"ode-bound", "f' - f^2", "-o", dir.string()});
  CHECK(rc == 0);
  out = json::parse(slurp(dir / "ode_bound.json"));
  CHECK(out["verdict"] == "SingletonS");

  CHECK(run({"ode-bound", "f - f", "-o", dir.string()}) == 5);
  CHECK(run({"ode-bound", "f +", "-o", dir.string()}) == 5);
}

TEST_CASE("ode-bound: JSON monomial input") {
  fs::path dir = freshDir("odejson");
  // f'' - z*f as tuples: t=(0,0,1) coeff 1; t=(1) coeff -z
  int rc = run({"ode-bound", "--monomials-json",
                R"([{"t":[0,0,1],"coeff":[1]},{"t":[1],"coeff":[0,-1]}])",
                "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "ode_bound.json"));
  CHECK(out["verdict"] == "Bound");
  CHECK(out["bound"] == "1/2");
  CHECK(out["kappaCandidates"][0] == "3/2");
}

TEST_CASE("ode-bound: growth verification requires a registered link") {
  fs::path dir = freshDir("odev");
  int rc = run({"ode-bound", "f' - f", "--verify-with", "exp", "--R", "1",
                "--rmin", "10", "--rmax", "60", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "ode_bound.json"));
  CHECK(out["verdict"] == "Bound");
  CHECK(out["bound"] == "1");
  double slope = out["growth_fit"]["slope"].get<double>();
  CHECK(std::abs(slope - 1.0) <= 0.02);

  CHECK(run({"ode-bound", "f'' - f", "--verify-with", "exp", "-o",
             dir.string()}) == 6);
}

TEST_CASE("wv-check: single radius JSON report") {
  fs::path dir = freshDir("wv");
  int rc = run({"wv-check", "--model", "exp", "--R", "1", "--r", "100",
                "--tau", "0.75", "--res", "600x600", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "wvcheck.json"));
  double err = out["report"]["rel_err_value"].get<double>();
  CHECK(err > 0.05 / 1.5);
  CHECK(err < 0.05 * 1.5);
  CHECK(out["report"]["disc_in_tract"] == true);
}

TEST_CASE("wv-check: sweep writes a CSV with the expected header") {
  fs::path dir = freshDir("sweep");
  int rc = run({"wv-check", "--model", "exp", "--R", "1", "--rmin", "30",
                "--rmax", "80", "--tau", "0.75", "--samples", "64", "--res",
                "500x500", "-o", dir.string()});
  CHECK(rc == 0);
  std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("r,a,disc_radius,disc_in_tract,rel_err_value,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 10);
  json out = json::parse(slurp(dir / "wvcheck.json"));
  for (const auto& e : out["sweep"]) CHECK(e["flagged"] == false);
}

TEST_CASE("wv-check: covering mode reports alpha and failures") {
  fs::path dir = freshDir("covering");
  int rc = run({"wv-check", "--model", "exp", "--R", "1", "--r", "50",
                "--covering", "--beta", "4", "--gamma", "3.5", "--res",
                "600x600", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "wvcheck.json"));
  CHECK(out["covering"]["covered"] == true);
  CHECK(out["covering"]["alpha_used"].get<double>() >= 3.7);

  rc = run({"wv-check", "--model", "exp", "--R", "1", "--r", "50",
            "--covering", "--alpha", "2", "--res", "600x600", "-o",
            dir.string()});
  CHECK(rc == 0);
  out = json::parse(slurp(dir / "wvcheck.json"));
  CHECK(out["covering"]["covered"] == false);
}

TEST_CASE("growth: circles below the tract reach exit 3") {
  CHECK(run({"growth", "--model", "gamma", "--R", "10", "--seed", "8",
             "--rmin", "0.05", "--rmax", "0.1", "--window", "-12,12,-12,12",
             "--res", "300x300"}) == 3);
}

TEST_CASE("tract-info: verdicts as JSON") {
  fs::path dir = freshDir("tinfo");
  int rc = run({"tract-info", "--model", "example1", "--lambda", "1", "--R",
                "6", "--seed", "-8", "--window", "-10,8,-12,12", "--res",
                "300x300", "--export-pgm", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "tract.json"));
  CHECK(out["direct"] == "ContainsPole");
  CHECK(fs::exists(dir / "tract.pgm"));

  CHECK(run({"tract-info", "--model", "exp", "--R", "1", "--seed", "-3",
             "--window", "-5,5,-5,5", "--res", "64x64"}) == 3);
}

TEST_CASE("outer-seq: two steps on exp via the CLI") {
  fs::path dir = freshDir("outer");
  int rc = run({"outer-seq", "--model", "exp", "--R", "1", "--g0-radius",
                "10", "--steps", "2", "--seed", "3", "-o", dir.string()});
  CHECK(rc == 0);
  json out = json::parse(slurp(dir / "outer_seq.json"));
  CHECK(out["steps_completed"] == 2);
  double r1 = out["steps"][0]["r_next"].get<double>();
  double r2 = out["steps"][1]["r_next"].get<double>();
  CHECK(r1 >= 48.0);
  CHECK(r2 > 2.0 * r1);
}
