#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"

#include "dts/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const struct Root {
    fs::path path = fs::temp_directory_path() / ("dts_test_cli_" + std::to_string(::getpid()));
    Root() { fs::create_directories(path); }
    ~Root() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } root;
  return root.path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(const std::string& args) {
  const fs::path out = work() / "stdout.txt";
  const fs::path err = work() / "stderr.txt";
  const std::string cmd = std::string("\"") + DTS_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string dir(const std::string& name) { return (work() / name).string(); }

// Every file except the manifest (which carries a timestamp) must match.
void check_same_outputs(const fs::path& a, const fs::path& b) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() != "manifest.json") names.push_back(e.path().filename().string());
  }
  REQUIRE_FALSE(names.empty());
  for (const auto& n : names) {
    CAPTURE(n);
    REQUIRE(fs::exists(b / n));
    CHECK(slurp(a / n) == slurp(b / n));
  }
}

const std::string& synth_dir() {
  static const std::string d = [] {
    const std::string out = dir("synth");
    const auto r = run_cli("synth --rows 8 --cols 8 --seed 3 --out-dir \"" + out + "\"");
    REQUIRE(r.code == 0);
    return out;
  }();
  return d;
}

}  // namespace

TEST_CASE("synth writes valid cubes and repeats bit-identically") {
  const std::string a = synth_dir();
  for (const char* f : {"source.json", "source.raw", "target.json", "target.raw", "endmembers.csv", "srf.csv",
                        "manifest.json"}) {
    CHECK(fs::exists(fs::path(a) / f));
  }
  CHECK(validate_cube(dts::io::read_cube(fs::path(a) / "source")).ok());
  CHECK(validate_cube(dts::io::read_cube(fs::path(a) / "target")).ok());
  const std::string b = dir("synth_again");
  REQUIRE(run_cli("synth --rows 8 --cols 8 --seed 3 --out-dir \"" + b + "\"").code == 0);
  check_same_outputs(a, b);
}

TEST_CASE("usage errors exit with 2") {
  const auto r = run_cli("synth --endmembers 0 --out-dir \"" + dir("bad") + "\"");
  CHECK(r.code == 2);
  CHECK(r.err.find("--endmembers") != std::string::npos);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("evaluate --reference x").code == 2);
  CHECK(run_cli("pipeline --source a --srf b --target-ms c --target-hs d").code == 2);
  CHECK(run_cli("--version").code == 0);
}

TEST_CASE("evaluate") {
  const std::string s = synth_dir();
  const std::string out = dir("eval");
  const auto r = run_cli("evaluate --reference \"" + s + "/source\" --estimate \"" + s + "/source\" --out-dir \"" + out +
                     "\"");
  REQUIRE(r.code == 0);
  std::istringstream rows(slurp(fs::path(out) / "quality.csv"));
  std::string header, row;
  std::getline(rows, header);
  std::getline(rows, row);
  CHECK(header == "MSE,PSNR,SAM,ERGAS");
  CHECK(row == "0,300,0,0");

  const auto self = run_cli("evaluate --reference \"" + s + "/source\" --estimate \"" + s + "/target\" --out-dir \"" +
                        out + "_2\"");
  REQUIRE(self.code == 0);
  std::istringstream rows2(slurp(fs::path(out + "_2") / "quality.csv"));
  std::getline(rows2, header);
  std::getline(rows2, row);
  std::stringstream cells(row);
  std::string cell;
  int fields = 0;
  while (std::getline(cells, cell, ',')) {
    std::size_t used = 0;
    std::stod(cell, &used);
    CHECK(used == cell.size());
    ++fields;
  }
  CHECK(fields == 4);
}

TEST_CASE("evaluate shape mismatch exits with 1 and prints both shapes") {
  const std::string s = synth_dir();
  const std::string small = dir("small");
  REQUIRE(run_cli("synth --rows 4 --cols 4 --out-dir \"" + small + "\"").code == 0);
  const auto r = run_cli("evaluate --reference \"" + s + "/source\" --estimate \"" + small + "/source\" --out-dir \"" +
                     dir("eval_bad") + "\"");
  CHECK(r.code == 1);
  CHECK(r.err.find("31x8x8") != std::string::npos);
  CHECK(r.err.find("31x4x4") != std::string::npos);
}

TEST_CASE("pipeline with a missing SRF exits with 1 naming the path") {
  const std::string s = synth_dir();
  const std::string missing = dir("nowhere/srf.csv");
  const auto r = run_cli("pipeline --source \"" + s + "/source\" --target-hs \"" + s + "/target\" --srf \"" + missing +
                     "\" --out-dir \"" + dir("pipe_bad") + "\"");
  CHECK(r.code == 1);
  CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("every command reruns bit-identically from its manifest") {
  const std::string s = synth_dir();
  const std::string quick = " --atoms 8 --iterations 3";
  struct Cmd {
    std::string name;
    std::string args;
  };
  const std::string deg = dir("degrade");
  const std::string learn = dir("learn");
  const std::string xfer = dir("transfer");
  const std::vector<Cmd> cmds{
      {"degrade", "degrade --input \"" + s + "/target\" --srf \"" + s + "/srf.csv\" --noise-sigma 0.01 --out-dir \"" +
                      deg + "\""},
      {"learn", "learn --input \"" + s + "/source\"" + quick + " --out-dir \"" + learn + "\""},
      {"transfer", "transfer --dictionary \"" + learn + "/dictionary.csv\" --source \"" + s + "/source\" --target \"" +
                       deg + "/degraded\" --srf \"" + s + "/srf.csv\"" + quick + " --out-dir \"" + xfer + "\""},
      {"reconstruct", "reconstruct --dictionary \"" + xfer + "/D_t.csv\" --side-spectra \"" + xfer +
                          "/Z_s.csv\" --target \"" + deg + "/degraded\" --srf \"" + s + "/srf.csv\" --truth \"" + s +
                          "/target\" --max-iters 40 --out-dir \"" + dir("reconstruct") + "\""},
      {"pipeline", "pipeline --source \"" + s + "/source\" --target-hs \"" + s + "/target\" --srf \"" + s +
                       "/srf.csv\"" + quick + " --max-iters 40 --out-dir \"" + dir("pipeline") + "\""},
      {"baseline", "pipeline --baseline --source \"" + s + "/source\" --target-hs \"" + s + "/target\" --srf \"" + s +
                       "/srf.csv\"" + quick + " --max-iters 40 --out-dir \"" + dir("baseline") + "\""},
  };
  for (const auto& c : cmds) {
    CAPTURE(c.name);
    const auto first = run_cli(c.args);
    CAPTURE(first.err);
    REQUIRE(first.code == 0);
  }
  for (const auto& [name, out] : std::vector<std::pair<std::string, std::string>>{
           {"synth", s}, {"degrade", deg}, {"learn", learn}, {"transfer", xfer}, {"reconstruct", dir("reconstruct")},
           {"pipeline", dir("pipeline")}, {"baseline", dir("baseline")}}) {
    CAPTURE(name);
    const std::string again = dir(name + "_rerun");
    const auto r = run_cli("rerun \"" + out + "/manifest.json\" --out-dir \"" + again + "\"");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    check_same_outputs(out, again);
  }
  CHECK(fs::exists(fs::path(dir("pipeline")) / "quality.csv"));
  CHECK(fs::exists(fs::path(dir("pipeline")) / "D_s.csv"));
  CHECK(fs::exists(fs::path(dir("pipeline")) / "admm.csv"));
}

TEST_CASE("manifests are flat and record the parameters") {
  const std::string s = synth_dir();
  const std::string m = slurp(fs::path(s) / "manifest.json");
  for (const char* key : {"\"command\"", "\"version\"", "\"timestamp\"", "\"seed\"", "\"endmembers\""}) {
    CHECK(m.find(key) != std::string::npos);
  }
  CHECK(run_cli("rerun \"" + dir("nowhere") + "/manifest.json\"").code == 1);
}
