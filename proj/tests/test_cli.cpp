#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "wpcsma/cli.hpp"
#include "wpcsma/scenario_io.hpp"

using namespace wpcsma;
namespace fs = std::filesystem;

namespace {

const fs::path kData = WPCSMA_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "wpcsma");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Data rows of a CSV, without the metadata header.
std::string csv_body(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') body += line + '\n';
  }
  return body;
}

}  // namespace

TEST_CASE("optimize writes results and a reusable point") {
  TempDir dir("wpcsma_cli_opt");
  const auto r = run({"optimize", "--scenario", (kData / "example2.json").string(), "--out",
                      dir.path.string()});
  REQUIRE(r.code == kExitOk);
  for (const char* f : {"results.csv", "results.json", "utility_trace.csv", "point.json"}) {
    CHECK(fs::exists(dir.path / f));
  }
  const auto results = nlohmann::json::parse(slurp(dir.path / "results.json"));
  CHECK(results["rows"].size() == 6);
  CHECK(results["metadata"]["tool_version"] == "1.0.0");

  SUBCASE("analyze reproduces the optimized table") {
    const auto a = run({"analyze", "--scenario", (kData / "example2.json").string(), "--point",
                        (dir.path / "point.json").string()});
    CHECK(a.code == kExitOk);
    const auto opt_rows = csv_body(slurp(dir.path / "results.csv"));
    CHECK(csv_body(a.out) == opt_rows);
  }
  SUBCASE("simulate is byte-identical for a repeated seed") {
    TempDir s1("wpcsma_cli_sim1"), s2("wpcsma_cli_sim2");
    for (const auto* d : {&s1, &s2}) {
      const auto sr = run({"simulate", "--scenario", (kData / "example2.json").string(), "--point",
                           (dir.path / "point.json").string(), "--slots", "20000", "--seed", "9",
                           "--out", d->path.string(), "--trace"});
      CHECK(sr.code == kExitOk);
    }
    for (const char* f : {"simulation.csv", "simulation.json", "slots.csv", "trace.csv"}) {
      CHECK(slurp(s1.path / f) == slurp(s2.path / f));
      CHECK_FALSE(slurp(s1.path / f).empty());
    }
  }
}

TEST_CASE("reproduce writes the experiment tables") {
  TempDir dir("wpcsma_cli_rep");
  const auto r = run({"reproduce", "--exp", "1", "--out", dir.path.string()});
  CHECK(r.code == kExitOk);
  for (const char* f : {"scenario.json", "results.csv", "optimal_n.csv", "energy.csv", "airtime.csv"}) {
    CHECK(fs::exists(dir.path / f));
  }
  CHECK(load_scenario(dir.path / "scenario.json") == example_scenario(1));
  CHECK(run({"reproduce", "--exp", "3", "--out", dir.path.string()}).code == kExitInvalidInput);
}

TEST_CASE("exit codes") {
  TempDir dir("wpcsma_cli_codes");
  SUBCASE("invalid scenario") {
    auto doc = scenario_to_json(example_scenario(2));
    doc["nodes"][0]["duty"]["h"] = 0;
    std::ofstream(dir.path / "bad.json") << doc.dump();
    const auto r = run({"optimize", "--scenario", (dir.path / "bad.json").string(), "--out",
                        dir.path.string()});
    CHECK(r.code == kExitInvalidInput);
    CHECK(r.err.find("duty.h") != std::string::npos);
  }
  SUBCASE("infeasible scenario") {
    auto doc = scenario_to_json(example_scenario(2));
    doc["nodes"][2]["power"]["phi_mw"] = 0.01;
    std::ofstream(dir.path / "starved.json") << doc.dump();
    const auto r = run({"optimize", "--scenario", (dir.path / "starved.json").string(), "--out",
                        dir.path.string()});
    CHECK(r.code == kExitInfeasible);
    CHECK(r.err.find("infeasible") != std::string::npos);
  }
  SUBCASE("missing file and unknown flag") {
    CHECK(run({"optimize", "--scenario", "/nonexistent.json", "--out", dir.path.string()}).code ==
          kExitInvalidInput);
    CHECK(run({"optimize", "--bogus"}).code == kExitInvalidInput);
  }
}
