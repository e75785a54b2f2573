// End-to-end checks of the command line tool, run as subprocesses.
#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "scrc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(SCRC_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

/// Generates the shared fixture (couples + a scripted sequence + a model)
/// once; later cases reuse the files.
const fs::path& fixture() {
  static const fs::path dir = [] {
    const fs::path d = work_dir();
    RunResult r = run_cli("synth --couples 1,2 --cycles 2 --half-period 150 "
                          "--seed 5 --out " + (d / "data").string());
    REQUIRE(r.code == 0);
    {
      std::ofstream script(d / "script.json");
      script << R"({"segments": [
        {"label": 2, "duration": 150, "ramp": 0},
        {"label": 1, "duration": 150, "ramp": 8},
        {"label": 3, "duration": 150, "ramp": 8}
      ]})";
    }
    r = run_cli("synth --script " + (d / "script.json").string() +
                " --seed 6 --out " + (d / "data").string() + " --name seq");
    REQUIRE(r.code == 0);
    r = run_cli("train --couples " + (d / "data").string() + " --out " +
                (d / "model.json").string() +
                " --window 40 --reps 10 --cluster-stride 2 --seed 3 "
                "--stamp 2026-01-01T00:00:00Z");
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("purity") != std::string::npos);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("synth writes couple files with sidecars, deterministically",
          "[cli]") {
  const fs::path& d = fixture();
  REQUIRE(fs::exists(d / "data" / "couple_g1.csv"));
  REQUIRE(fs::exists(d / "data" / "couple_g1.meta.json"));
  REQUIRE(fs::exists(d / "data" / "couple_g2.csv"));
  REQUIRE(fs::exists(d / "data" / "seq.csv"));

  RunResult r = run_cli("synth --couples 1 --cycles 2 --half-period 150 "
                        "--seed 5 --out " + (d / "data2").string());
  REQUIRE(r.code == 0);
  REQUIRE(slurp(d / "data" / "couple_g1.csv") ==
          slurp(d / "data2" / "couple_g1.csv"));
}

TEST_CASE("train reports couple diagnostics and writes a model", "[cli]") {
  const fs::path& d = fixture();
  REQUIRE(fs::exists(d / "model.json"));
  json model = json::parse(slurp(d / "model.json"));
  REQUIRE(model["kind"] == "gesture-model");
  REQUIRE(model["scalar"] == "complex");
  REQUIRE(model["scheme"]["gesture_ids"] == json::array({1, 2}));
  REQUIRE(model["provenance"]["created"] == "2026-01-01T00:00:00Z");
  REQUIRE(model["provenance"]["inputs"].size() == 2);
}

TEST_CASE("train names a missing gesture", "[cli]") {
  const fs::path& d = fixture();
  RunResult r = run_cli("train --couples " + (d / "data").string() +
                        " --gestures 1,2,3 --out " +
                        (d / "nope.json").string() + " --window 40");
  REQUIRE(r.code == 2);
  REQUIRE(r.err.find("gesture id 3") != std::string::npos);
}

TEST_CASE("classify emits one row per window", "[cli]") {
  const fs::path& d = fixture();
  RunResult r = run_cli("classify --model " + (d / "model.json").string() +
                        " --input " + (d / "data" / "couple_g1.csv").string() +
                        " --out " + (d / "labels.csv").string());
  REQUIRE(r.code == 0);
  // 600 samples, window 40, step 1 -> 561 windows + header
  REQUIRE(count_lines(slurp(d / "labels.csv")) == 562);

  RunResult u = run_cli("classify --model " + (d / "model.json").string() +
                        " --input " + (d / "data" / "couple_g1.csv").string() +
                        " --out " + (d / "labels_u.csv").string() +
                        " --unmapped");
  REQUIRE(u.code == 0);
  REQUIRE(slurp(d / "labels.csv") != slurp(d / "labels_u.csv"));
}

TEST_CASE("evaluate writes a report with tolerant accuracy", "[cli]") {
  const fs::path& d = fixture();
  RunResult r = run_cli("evaluate --model " + (d / "model.json").string() +
                        " --input " + (d / "data" / "couple_g1.csv").string() +
                        " --report " + (d / "rep.json").string() +
                        " --tolerance 40");
  REQUIRE(r.code == 0);
  json rep = json::parse(slurp(d / "rep.json"));
  REQUIRE(rep["accuracy"].get<double>() >= 0.8);
  REQUIRE(rep["tolerance_windows"] == 40);
  REQUIRE(rep["confusion"].is_array());
}

TEST_CASE("compare sweeps sigma and reports both classifiers", "[cli]") {
  const fs::path& d = fixture();
  RunResult r = run_cli("compare --couples " + (d / "data").string() +
                        " --gestures 1,2 --test " +
                        (d / "data" / "seq.csv").string() + " --report " +
                        (d / "cmp.json").string() +
                        " --sigmas 0.01,0.1 --window 40 --reps 10 "
                        "--cluster-stride 2 --tolerance 40");
  REQUIRE(r.code == 0);
  json rep = json::parse(slurp(d / "cmp.json"));
  REQUIRE(rep["rows"].size() == 2);
  REQUIRE(rep["rows"][0]["sigma"] == 0.01);
  REQUIRE(rep["rows"][0]["scrc"]["accuracy"].is_number());
  REQUIRE(rep["rows"][0]["crc"]["accuracy"].is_number());
  REQUIRE(rep["shift_augmented"] == false);
}

TEST_CASE("exit codes distinguish usage from data problems", "[cli]") {
  const fs::path& d = fixture();
  REQUIRE(run_cli("bogus-subcommand").code == 1);
  REQUIRE(run_cli("synth --out " + (d / "x").string()).code == 1);
  REQUIRE(run_cli("classify --model " + (d / "absent.json").string() +
                  " --input " + (d / "data" / "couple_g1.csv").string() +
                  " --out " + (d / "l.csv").string())
              .code == 2);
  REQUIRE(run_cli("--help").code == 0);
}

TEST_CASE("synth rejects a script and couples together", "[cli]") {
  const fs::path& d = fixture();
  RunResult r = run_cli("synth --couples 1 --script " +
                        (d / "script.json").string() + " --out " +
                        (d / "y").string());
  REQUIRE(r.code == 1);
}
