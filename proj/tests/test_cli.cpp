#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("fps_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

const Scratch& scratch() {
  static Scratch s;
  return s;
}

int run(const std::string& args) {
  const std::string cmd = std::string(FPS_CLI_PATH) + " " + args + " 2>" + scratch()("stderr.txt");
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

nlohmann::json load_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace

TEST_CASE("version and usage errors") {
  CHECK(run("--version > " + scratch()("v.txt")) == 0);
  CHECK(slurp(scratch()("v.txt")).find('.') != std::string::npos);
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("solve") == 1);  // --matrix is required
}

TEST_CASE("solve on the toy matrix") {
  write(scratch()("toy.csv"), "0.9,0.8,0\n0.8,0.9,0\n0,0,1\n");
  const std::string out = scratch()("solve.json");
  REQUIRE(run("solve --matrix " + scratch()("toy.csv") + " --rho 0.05 --json " + out + " --h-out " +
              scratch()("h.csv")) == 0);
  const auto j = load_json(out);
  CHECK(j["converged"] == true);
  CHECK(j["support"] == nlohmann::json::array({0, 1}));
  CHECK(j["kkt"]["fantope_optimality_gap"].get<double>() <= 1e-4);
  CHECK(slurp(scratch()("h.csv")).find(',') != std::string::npos);
}

TEST_CASE("solve with a large penalty returns e3") {
  // rho = 0.95 exceeds every off-diagonal entry, so H is the top diagonal indicator.
  const std::string out = scratch()("e3.json");
  REQUIRE(run("solve --matrix " + scratch()("toy.csv") + " --rho 0.95 --json " + out) == 0);
  CHECK(load_json(out)["support"] == nlohmann::json::array({2}));
}

TEST_CASE("solve exit codes") {
  write(scratch()("ragged.csv"), "1,2\n3\n");
  CHECK(run("solve --matrix " + scratch()("ragged.csv")) == 1);
  write(scratch()("rect.csv"), "1,2,3\n4,5,6\n");
  CHECK(run("solve --matrix " + scratch()("rect.csv")) == 1);
  CHECK(run("solve --matrix " + scratch()("missing.csv")) == 1);
  CHECK(run("solve --matrix " + scratch()("toy.csv") + " --k 5") == 1);
  // One iteration cannot converge.
  const std::string out = scratch()("nc.json");
  CHECK(run("solve --matrix " + scratch()("toy.csv") + " --rho 0.1 --max-iters 1 --json " + out) == 2);
  CHECK(load_json(out)["converged"] == false);
}

TEST_CASE("model writes a covariance and metadata") {
  const std::string sigma = scratch()("sigma.csv"), s = scratch()("s.csv"), meta = scratch()("m.json");
  REQUIRE(run("model --kind spiked --p 12 --s 4 --k 1 --spikes 3 --seed 5 --n 300 --sigma-out " + sigma +
              " --s-out " + s + " --json " + meta) == 0);
  const auto j = load_json(meta);
  CHECK(j["p"] == 12);
  CHECK(j["J"] == nlohmann::json::array({0, 1, 2, 3}));
  CHECK(j["gap"].get<double>() == doctest::Approx(3.0));
  CHECK(!slurp(s).empty());
  CHECK(run("model --kind spiked --p 12 --s 20 --sigma-out " + sigma) == 1);
  CHECK(run("model --kind nope --sigma-out " + sigma) == 1);
  CHECK(run("model --kind toy") == 1);  // --sigma-out missing
}

TEST_CASE("certify exit codes") {
  const std::string sigma = scratch()("toy0.csv");
  REQUIRE(run("model --kind toy --t 0 --sigma-out " + sigma + " --json " + scratch()("toy0.json")) == 0);
  const std::string out = scratch()("cert.json");
  // Inside the region where every condition holds.
  CHECK(run("certify --sigma " + sigma + " --s " + sigma + " --J 0,1 --rho 0.004 --json " + out) == 0);
  CHECK(load_json(out)["certified"] == true);
  // The second deterministic condition fails at rho = 0.01 although the witness is valid.
  CHECK(run("certify --sigma " + sigma + " --s " + sigma + " --J 0,1 --rho 0.01 --json " + out) == 3);
  const auto j = load_json(out);
  CHECK(j["witness"]["witness_valid"] == true);
  CHECK(j["conditions"]["det_cond2_ok"] == false);
  // A covariance without a gap at k.
  write(scratch()("eye.csv"), "1,0,0\n0,1,0\n0,0,1\n");
  CHECK(run("certify --sigma " + scratch()("eye.csv") + " --s " + scratch()("eye.csv") + " --J 0 --rho 0.1") == 3);
  CHECK(run("certify --sigma " + sigma + " --s " + sigma + " --J 0,7 --rho 0.1") == 1);
}

TEST_CASE("phase sweep is byte-identical across reruns") {
  const std::string cfg = scratch()("phase.cfg");
  write(cfg,
        "# small sweep\n"
        "p = 20\n"
        "s = 3\n"
        "n = 500, 2000\n"
        "trials = 3\n"
        "seed = 11\n");
  const std::string a = scratch()("a.csv"), b = scratch()("b.csv");
  REQUIRE(run("phase --config " + cfg + " -o " + a) == 0);
  REQUIRE(run("phase --config " + cfg + " -o " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  auto summary = load_json(a + ".summary.json");
  auto other = load_json(b + ".summary.json");
  CHECK(summary["config"]["output"] == a);
  summary["config"].erase("output");
  other["config"].erase("output");
  CHECK(summary == other);
  CHECK(summary["command"] == "phase");
  CHECK(summary["records"] == 6);
  CHECK(summary["config"]["seed"] == 11);

  // --seed and FPS_SEED both change the output.
  REQUIRE(run("phase --config " + cfg + " --seed 12 -o " + b) == 0);
  CHECK(slurp(a) != slurp(b));
  REQUIRE(std::system(("FPS_SEED=12 " + std::string(FPS_CLI_PATH) + " phase --config " + cfg + " -o " +
                       scratch()("c.csv") + " 2>/dev/null")
                          .c_str()) == 0);
  CHECK(slurp(scratch()("c.csv")) == slurp(b));
}

TEST_CASE("sweep config errors") {
  const std::string cfg = scratch()("bad.cfg");
  write(cfg, "p = 20\nunknown_key = 3\n");
  CHECK(run("phase --config " + cfg) == 1);
  CHECK(run("phase --config " + scratch()("nope.cfg")) == 1);
}

TEST_CASE("persist and clique sweeps write CSV and summary") {
  const std::string cfg = scratch()("persist.cfg");
  write(cfg, "p = 10\ns = 3\nn = 400\ntrials = 2\n");
  const std::string out = scratch()("persist.csv");
  REQUIRE(run("persist --config " + cfg + " -o " + out + " --summary " + scratch()("persist.json")) == 0);
  const auto j = load_json(scratch()("persist.json"));
  CHECK(j["cells"][0]["sandwich_ok"] == 2);

  const std::string cq = scratch()("clique.csv");
  REQUIRE(run("clique --p 30 --s 15 --trials 2 -o " + cq) == 0);
  CHECK(load_json(cq + ".summary.json")["cells"][0]["trials"] == 2);
  CHECK(run("clique --p 10 --s 12") == 1);
}
