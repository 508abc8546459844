#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "bellsim/io.hpp"

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Drives the installed binary like a user would: through a shell.
int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(BELLSIM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) text.append(buf, got);
  const int status = ::pclose(pipe);
  if (output) *output = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           (stem + "-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

std::size_t count_lines(const fs::path& path) {
  const std::string text = read_text(path);
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

json simulate_config(const std::string& model, std::uint64_t trials,
                     std::uint64_t seed, bool reveal = false,
                     const std::string& mode = "parallel") {
  return json{{"model", {{"name", model}}},
              {"run",
               {{"trials", trials},
                {"seed", seed},
                {"mode", mode},
                {"reveal_hidden", reveal}}}};
}

const char* kTableText =
    R"({"plane": "xy", "a_deg": [0, 90], "b_deg": [45, 135]})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("oracle subcommand checks the quadruple combinatorics") {
  std::string out;
  CHECK(run_cli("oracle", &out) == 0);
  CHECK(out.find("equality_count distribution: {0: 2, 2: 12, 4: 2}") !=
        std::string::npos);
  CHECK(out.find("delta min: -2, max: 0") != std::string::npos);
  CHECK(out.find("result: PASS") != std::string::npos);
}

TEST_CASE("usage errors exit with the parse code") {
  std::string out;
  CHECK(run_cli("", &out) == 64);            // a subcommand is required
  CHECK(run_cli("frobnicate", &out) == 64);  // unknown subcommand
  CHECK(run_cli("simulate", &out) == 64);    // missing arguments
  CHECK(run_cli("analyze somelog", &out) == 64);  // --table is required
  CHECK(run_cli("--help", &out) == 0);
  CHECK(out.find("simulate") != std::string::npos);
  CHECK(run_cli("--version", &out) == 0);
  CHECK(out.find("0.1.0") != std::string::npos);
}

TEST_CASE("simulate writes a deterministic log plus manifest") {
  TempDir dir("cli-sim");
  write_text(dir.file("cfg.json"), simulate_config("singlet", 3000, 77).dump());

  std::string out;
  CHECK(run_cli("simulate " + dir.file("cfg.json") + " -o " + dir.file("run1"),
                &out) == 0);
  CHECK(out.find("wrote 3000 trials") != std::string::npos);
  CHECK(count_lines(dir.path / "run1" / "trials.jsonl") == 3000);

  const json manifest = json::parse(read_text(dir.path / "run1" / "manifest.json"));
  CHECK(manifest["seed"] == 77);
  CHECK(manifest["artifact_version"] == "0.1.0");
  CHECK(manifest["config"]["model"]["name"] == "singlet");

  // Same config, fresh directory: byte-identical trials.
  CHECK(run_cli("simulate " + dir.file("cfg.json") + " -o " + dir.file("run2")) == 0);
  CHECK(read_text(dir.path / "run1" / "trials.jsonl") ==
        read_text(dir.path / "run2" / "trials.jsonl"));

  // Worker count from the environment does not change the bytes either.
  const std::string cmd = "BELLSIM_WORKERS=3 " + std::string(BELLSIM_CLI_PATH) +
                          " simulate " + dir.file("cfg.json") + " -o " +
                          dir.file("run3") + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fread(buf, 1, sizeof buf, pipe) > 0) {}
  CHECK(WEXITSTATUS(::pclose(pipe)) == 0);
  CHECK(read_text(dir.path / "run1" / "trials.jsonl") ==
        read_text(dir.path / "run3" / "trials.jsonl"));
}

TEST_CASE("simulate handles edge configs") {
  TempDir dir("cli-sim-edge");
  write_text(dir.file("empty.json"), simulate_config("uniform-lhv", 0, 1).dump());
  CHECK(run_cli("simulate " + dir.file("empty.json") + " -o " + dir.file("out0")) == 0);
  CHECK(count_lines(dir.path / "out0" / "trials.jsonl") == 0);

  // Memory model in parallel mode violates the engine contract.
  write_text(dir.file("mem-par.json"),
             simulate_config("memory-lhv", 100, 1).dump());
  std::string out;
  CHECK(run_cli("simulate " + dir.file("mem-par.json") + " -o " + dir.file("outp"),
                &out) == 65);
  CHECK(out.find("sequential") != std::string::npos);

  write_text(dir.file("mem-seq.json"),
             simulate_config("memory-lhv", 100, 1, false, "sequential").dump());
  CHECK(run_cli("simulate " + dir.file("mem-seq.json") + " -o " + dir.file("outs")) == 0);

  // Config problems are parse failures.
  write_text(dir.file("bad.json"), R"({"model": {"name": "nope"}})");
  CHECK(run_cli("simulate " + dir.file("bad.json") + " -o " + dir.file("outb")) == 64);
  write_text(dir.file("nomodel.json"), R"({"run": {"trials": 10}})");
  CHECK(run_cli("simulate " + dir.file("nomodel.json") + " -o " + dir.file("outn")) == 64);
  CHECK(run_cli("simulate " + dir.file("missing.json") + " -o " + dir.file("outm")) == 64);
}

TEST_CASE("analyze reports a violation for singlet data") {
  TempDir dir("cli-ana");
  write_text(dir.file("cfg.json"), simulate_config("singlet", 20000, 501).dump());
  write_text(dir.file("table.json"), kTableText);
  REQUIRE(run_cli("simulate " + dir.file("cfg.json") + " -o " + dir.file("run")) == 0);

  std::string out;
  const int code = run_cli("analyze " + dir.file("run") + "/trials.jsonl --table " +
                               dir.file("table.json"),
                           &out);
  CHECK(code == 10);
  CHECK(out.find("inequality violated") != std::string::npos);

  const json summary = json::parse(read_text(dir.path / "run" / "analysis.json"));
  CHECK(summary["bell_estimate"]["violation"] == true);
  const double s_hat = summary["bell_estimate"]["s_hat"].get<double>();
  CHECK(s_hat > 0.3);
  CHECK(s_hat < 0.52);
  CHECK(summary["quantum_prediction"].get<double>() ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(summary["no_signaling"]["rejected"] == false);
  // The adjacent manifest is embedded for provenance.
  CHECK(summary["manifest"]["seed"] == 501);
  // No quadruples were revealed, so the freedom test is absent.
  CHECK_FALSE(summary.contains("freedom"));
}

TEST_CASE("analyze accepts local data and runs the freedom test when it can") {
  TempDir dir("cli-ana-lhv");
  write_text(dir.file("cfg.json"),
             simulate_config("uniform-lhv", 20000, 502, true).dump());
  write_text(dir.file("table.json"), kTableText);
  REQUIRE(run_cli("simulate " + dir.file("cfg.json") + " -o " + dir.file("run")) == 0);

  std::string out;
  const int code = run_cli("analyze " + dir.file("run") + "/trials.jsonl --table " +
                               dir.file("table.json") + " -o " +
                               dir.file("summary.json"),
                           &out);
  CHECK(code == 0);
  CHECK(out.find("consistent with local realism") != std::string::npos);
  const json summary = json::parse(read_text(dir.file("summary.json")));
  CHECK(summary["bell_estimate"]["violation"] == false);
  CHECK(summary["freedom"]["dof"] == 45);
  CHECK(summary["freedom"]["p_value"].get<double>() > 1e-9);
}

TEST_CASE("analyze rejects unusable logs with distinct exit codes") {
  TempDir dir("cli-ana-bad");
  write_text(dir.file("table.json"), kTableText);

  // Only pair (1,1) was ever measured: a contract failure, not a parse one.
  std::string one_pair;
  for (int i = 0; i < 10; ++i)
    one_pair += "{\"index\":" + std::to_string(i) +
                ",\"a\":1,\"b\":1,\"x\":1,\"y\":1,\"revealed\":null}\n";
  write_text(dir.file("onepair.jsonl"), one_pair);
  std::string out;
  CHECK(run_cli("analyze " + dir.file("onepair.jsonl") + " --table " +
                    dir.file("table.json"),
                &out) == 65);
  CHECK(out.find("setting pair") != std::string::npos);

  // A corrupted line is a parse failure naming the line.
  write_text(dir.file("broken.jsonl"),
             "{\"index\":0,\"a\":1,\"b\":1,\"x\":1,\"y\":1,\"revealed\":null}\n"
             "garbage\n");
  CHECK(run_cli("analyze " + dir.file("broken.jsonl") + " --table " +
                    dir.file("table.json"),
                &out) == 64);
  CHECK(out.find("log line 2") != std::string::npos);

  CHECK(run_cli("analyze " + dir.file("absent.jsonl") + " --table " +
                    dir.file("table.json")) == 64);
}

TEST_CASE("hp-audit flags the reference family and clears the uniform one") {
  TempDir dir("cli-hp");
  const json ref{{"hp",
                  {{"family", "reference"},
                   {"a_grid_deg", {0.0, 45.0, 90.0}},
                   {"b_grid_deg", {0.0, 90.0}}}}};
  write_text(dir.file("ref.json"), ref.dump());
  std::string out;
  CHECK(run_cli("hp-audit " + dir.file("ref.json") + " -o " + dir.file("ref-out"),
                &out) == 20);
  CHECK(out.find("verdict non_local") != std::string::npos);
  const json rep = json::parse(read_text(dir.path / "ref-out" / "hp_audit.json"));
  CHECK(rep["verdict"] == "non_local");
  CHECK(rep["per_slab"][0]["i"] == -2);
  CHECK(rep["per_slab"][0]["b_dependence"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep["witnesses"].size() >= 1);
  CHECK(rep["config"]["hp"]["family"] == "reference");

  const json uni{{"hp",
                  {{"family", "uniform_local"},
                   {"a_grid_deg", {0.0, 45.0, 90.0}},
                   {"b_grid_deg", {0.0, 90.0}}}}};
  write_text(dir.file("uni.json"), uni.dump());
  CHECK(run_cli("hp-audit " + dir.file("uni.json") + " -o " + dir.file("uni-out"),
                &out) == 0);
  CHECK(out.find("verdict local") != std::string::npos);
  const json urep = json::parse(read_text(dir.path / "uni-out" / "hp_audit.json"));
  CHECK(urep["verdict"] == "local");
  CHECK(urep["witnesses"].empty());

  // A config without an hp section cannot be audited.
  write_text(dir.file("nohp.json"), R"({"run": {"trials": 1}})");
  CHECK(run_cli("hp-audit " + dir.file("nohp.json") + " -o " + dir.file("x")) == 64);
}

}  // TEST_SUITE
