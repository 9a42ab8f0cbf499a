#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

#ifndef MPS_CLI_PATH
#error "MPS_CLI_PATH must point at the command line binary"
#endif

int run_cli(const std::string& args) {
  const std::string command = std::string(MPS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("mps_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path file = dir / name;
  std::ofstream out(file);
  out << text;
  return file;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const char* kNormalModel = R"({"kind": "independent", "marginal": {"family": "normal"}})";

}  // namespace

TEST_CASE("cli: usage errors exit with 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("conditions") == 2);                          // missing --model
  CHECK(run_cli("conditions --model /no/such/file.json") == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: schema errors exit with 2, preconditions with 3") {
  const auto dir = fresh_dir("schema");
  const auto bad = write_file(dir, "bad.json", R"({"kind": "independent"})");
  CHECK(run_cli("conditions --model " + bad.string() + " --out " + dir.string()) == 2);

  const auto cauchy = write_file(
      dir, "cauchy.json", R"({"kind": "independent", "marginal": {"family": "cauchy"}})");
  CHECK(run_cli("conditions --model " + cauchy.string() + " --out " + dir.string()) == 2);

  const auto model = write_file(dir, "normal.json", kNormalModel);
  CHECK(run_cli("conditions --model " + model.string() + " --n 0 --out " + dir.string()) == 3);
  CHECK(run_cli("conditions --model " + model.string() + " --ell 999 --out " + dir.string()) == 3);
}

TEST_CASE("cli: conditions report content") {
  const auto dir = fresh_dir("conditions");
  const auto model = write_file(dir, "normal.json", kNormalModel);
  REQUIRE(run_cli("conditions --model " + model.string() + " --n 100 --out " + dir.string()) == 0);

  const std::string csv = slurp(dir / "report.csv");
  CHECK(csv.rfind("statistic,n,ell,delta,eps,value,threshold,verdict\n", 0) == 0);
  // A'_100(1) for iid standard normal terms is E|Z|^3 / 10
  CHECK(csv.find("lyapounov,100,4,1,1,0.159576912160573") != std::string::npos);
  CHECK(csv.find("Ha,100,4,1,1,1,0.10000000000000001,pass") != std::string::npos);
  CHECK(csv.find("dom_BN-RS,") != std::string::npos);

  const std::string txt = slurp(dir / "report.txt");
  CHECK(txt.rfind("command: conditions\n", 0) == 0);
  CHECK(txt.find("seed: 42") != std::string::npos);
}

TEST_CASE("cli: clt runs are byte-identical across reruns and thread counts") {
  const auto dir = fresh_dir("clt");
  const auto model = write_file(dir, "normal.json", kNormalModel);
  const std::string base = "clt --model " + model.string() + " --n 64 --R 500 --seed 9";
  for (const std::string tag : {"a", "b"})
    REQUIRE(run_cli(base + " --out " + (dir / tag).string()) == 0);
  REQUIRE(run_cli(base + " --threads 4 --out " + (dir / "c").string()) == 0);

  for (const char* name : {"report.csv", "report.txt", "ensemble.csv"})
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  // report.txt echoes the resolved config (including --threads) and is
  // expected to differ; the numeric bodies must not
  for (const char* name : {"report.csv", "ensemble.csv"})
    CHECK(slurp(dir / "a" / name) == slurp(dir / "c" / name));
  // a different seed must change the ensemble
  REQUIRE(run_cli("clt --model " + model.string() + " --n 64 --R 500 --seed 10 --out " +
                  (dir / "d").string()) == 0);
  CHECK(slurp(dir / "a" / "ensemble.csv") != slurp(dir / "d" / "ensemble.csv"));
}

TEST_CASE("cli: generate, variance, fdd, newman smoke") {
  const auto dir = fresh_dir("smoke");
  const auto model = write_file(dir, "normal.json", kNormalModel);
  const auto ar1 = write_file(dir, "ar1.json",
                              R"({"kind": "gaussian-assoc",
                                  "covariance": {"rule": "ar1", "phi": 0.5}})");

  REQUIRE(run_cli("generate --model " + model.string() + " --n 8 --R 2 --out " +
                  (dir / "gen").string()) == 0);
  const std::string path_csv = slurp(dir / "gen" / "path.csv");
  CHECK(path_csv.rfind("replicate,k,value\n", 0) == 0);
  CHECK(std::count(path_csv.begin(), path_csv.end(), '\n') == 17);  // header + 2*8 rows

  REQUIRE(run_cli("variance --model " + ar1.string() + " --n 32 --R 4000 --out " +
                  (dir / "var").string()) == 0);
  CHECK(slurp(dir / "var" / "report.csv").find("s2_exact,") != std::string::npos);

  REQUIRE(run_cli("fdd --model " + model.string() + " --n 100 --R 400 --out " +
                  (dir / "fdd").string()) == 0);
  CHECK(slurp(dir / "fdd" / "report.csv").find("max_abs_deviation,") != std::string::npos);

  REQUIRE(run_cli("newman --model " + ar1.string() + " --k 2 --R 4000 --out " +
                  (dir / "nm").string()) == 0);
  const std::string nm = slurp(dir / "nm" / "report.csv");
  CHECK(nm.find("gap(t=") != std::string::npos);
  CHECK(nm.find("fail") == std::string::npos);
}

TEST_CASE("cli: ruin scenario") {
  const auto dir = fresh_dir("ruin");
  const auto scenario = write_file(dir, "scenario.json",
                                   R"({"u": 5.0, "c": 1.5, "claims": )" + std::string(kNormalModel) +
                                       R"(, "claim_shift": 1.0})");
  REQUIRE(run_cli("ruin --scenario " + scenario.string() + " --horizon 20 --R 2000 --out " +
                  dir.string()) == 0);
  const std::string csv = slurp(dir / "report.csv");
  CHECK(csv.find("ruin_exact_sim,") != std::string::npos);
  CHECK(csv.find("ruin_brownian_approx,") != std::string::npos);
  CHECK(slurp(dir / "path.csv").rfind("period,surplus\n", 0) == 0);

  const auto bad = write_file(dir, "bad.json", R"({"u": 1.0, "count": "weekly"})");
  CHECK(run_cli("ruin --scenario " + bad.string() + " --out " + dir.string()) == 2);
}
