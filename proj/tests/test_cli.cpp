#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "mma/io.hpp"

namespace fs = std::filesystem;
using namespace mma;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "mma_cli_test";

// Runs the CLI with stderr captured to <root>/stderr.txt; returns the exit code.
int mma_cmd(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + MMA_CLI_PATH + " " + args + " >" + (kRoot / "stdout.txt").string() +
                          " 2>" + (kRoot / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string err_text() { return read_file((kRoot / "stderr.txt").string()); }

std::string p(const std::string& rel) { return (kRoot / rel).string(); }

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  for (std::string line; std::getline(in, line);) n += line.empty() ? 0 : 1;
  return n;
}

struct Fresh {
  Fresh() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_CASE("gen writes cases, manifest and questions reproducibly") {
  Fresh f;
  REQUIRE(mma_cmd("gen --seed 7 --types A:1,B:1,C:1,D:1 --out " + p("s1")) == 0);
  CHECK(count_lines(p("s1/manifest.jsonl")) == 4);
  int files = 0;
  for (const auto& e : fs::directory_iterator(p("s1/cases"))) files += e.path().extension() == ".json";
  CHECK(files == 4);
  CHECK(count_lines(p("s1/qa.jsonl")) > 0);
  REQUIRE(mma_cmd("gen --seed 7 --types A:1,B:1,C:1,D:1 --out " + p("s2")) == 0);
  for (const char* name : {"manifest.jsonl", "qa.jsonl", "suite.json"}) {
    CHECK(read_file(p(std::string("s1/") + name)) == read_file(p(std::string("s2/") + name)));
  }
  for (const auto& e : fs::directory_iterator(p("s1/cases"))) {
    CHECK(read_file(e.path().string()) == read_file(p("s2/cases/" + e.path().filename().string())));
  }
  const auto snap = json::parse(read_file(p("s1/suite.json")));
  CHECK(snap["version"] == kToolVersion);
}

TEST_CASE("gen with zero counts warns and writes an empty manifest") {
  Fresh f;
  CHECK(mma_cmd("gen --seed 1 --types A:0 --out " + p("empty")) == 0);
  CHECK(err_text().find("warning") != std::string::npos);
  CHECK(read_file(p("empty/manifest.jsonl")).empty());
  CHECK(mma_cmd("run --suite " + p("empty") + " --out " + p("er")) == 0);
  CHECK(err_text().find("warning") != std::string::npos);
  CHECK(read_file(p("er/transcripts.jsonl")).empty());
  CHECK(mma_cmd("gen --types Q:3 --out " + p("bad")) == 1);
}

TEST_CASE("run and score") {
  Fresh f;
  REQUIRE(mma_cmd("gen --seed 3 --types A:2,B:2,C:1,D:1 --out " + p("suite")) == 0);
  CHECK(mma_cmd("run --suite " + p("missing") + " --out " + p("r")) == 1);
  CHECK(err_text().find("suite not found") != std::string::npos);

  REQUIRE(mma_cmd("run --suite " + p("suite") + " --mask full --mode text --out " + p("full")) == 0);
  REQUIRE(mma_cmd("run --suite " + p("suite") + " --mask st --mode text --out " + p("st")) == 0);
  CHECK(count_lines(p("full/transcripts.jsonl")) == 6);
  CHECK(count_lines(p("full/audit.jsonl")) == 12);
  CHECK(read_file(p("full/audit.jsonl")) != read_file(p("st/audit.jsonl")));
  const auto cfg = json::parse(read_file(p("full/config.json")));
  CHECK(cfg["version"] == kToolVersion);
  CHECK(cfg["config"]["agent"]["confidence"]["mask"] == "full");

  REQUIRE(mma_cmd("score --suite " + p("suite") + " --transcripts " + p("full/transcripts.jsonl") +
                  " --answers " + p("full/qa_answers.jsonl") + " --beta 0.5 --gamma 1.0 --out " +
                  p("rep")) == 0);
  const auto table = read_file(p("rep/table.csv"));
  CHECK(table.rfind("# mma 0.1.0 beta=0.5 gamma=1 step=final\n", 0) == 0);
  CHECK(table.find("Method,Mode,Core Acc.,Verdict Acc.,CoRe Score,Type B Acc.,Type D Score") !=
        std::string::npos);
  const auto report = json::parse(read_file(p("rep/report.json")));
  CHECK(report["config"]["params"]["beta"] == 0.5);
  CHECK(report["report"]["modes"].size() == 1);

  const auto all = read_file(p("full/transcripts.jsonl"));
  std::ofstream(p("bad.jsonl")) << all.substr(0, all.find('\n')) << "\n{\"case_id\": 3}\n";
  CHECK(mma_cmd("score --suite " + p("suite") + " --transcripts " + p("bad.jsonl") + " --out " +
                p("rep2")) == 2);
  CHECK(err_text().find("line 2") != std::string::npos);
}

TEST_CASE("config directory from the environment") {
  Fresh f;
  REQUIRE(mma_cmd("gen --seed 3 --types A:1 --out " + p("suite")) == 0);
  fs::create_directories(p("conf"));
  std::ofstream(p("conf/agent.json")) << R"({"confidence": {"mask": "st", "tau": 0.6}, "k": 9})";
  REQUIRE(mma_cmd("run --suite " + p("suite") + " --out " + p("r"), "MMA_CONFIG_DIR=" + p("conf")) == 0);
  const auto cfg = json::parse(read_file(p("r/config.json")));
  CHECK(cfg["config"]["agent"]["confidence"]["mask"] == "st");
  CHECK(cfg["config"]["agent"]["confidence"]["tau"] == 0.6);
  CHECK(cfg["config"]["agent"]["k"] == 9);
}

TEST_CASE("eval reproduces the coverage utility and writes the alpha sweep") {
  Fresh f;
  {
    std::ofstream out(p("cov.jsonl"));
    int id = 0;
    for (int i = 0; i < 1166; ++i) out << json{{"question_id", std::to_string(id++)}, {"gold", "a"}, {"prediction", "a"}}.dump() << '\n';
    for (int i = 0; i < 298; ++i) out << json{{"question_id", std::to_string(id++)}, {"gold", "a"}, {"prediction", "b"}}.dump() << '\n';
    for (int i = 0; i < 78; ++i) out << json{{"question_id", std::to_string(id++)}, {"gold", "a"}, {"prediction", nullptr}}.dump() << '\n';
  }
  REQUIRE(mma_cmd("eval --records " + p("cov.jsonl") + " --regime coverage --lambda 1 --r 0.2 --method st --out " + p("e1")) == 0);
  CHECK(read_file(p("e1/coverage.csv")).find(",883.6\n") != std::string::npos);
  const auto summary = json::parse(read_file(p("e1/summary.json")));
  CHECK(summary["utility"].get<double>() == doctest::Approx(883.6));

  {
    std::ofstream out(p("fever.jsonl"));
    for (int i = 0; i < 10; ++i) out << json{{"question_id", std::to_string(i)}, {"gold", i < 3 ? "NEI" : "SUPPORTS"}, {"prediction", i < 5 ? json(nullptr) : json("SUPPORTS")}}.dump() << '\n';
  }
  REQUIRE(mma_cmd("eval --records " + p("fever.jsonl") + " " + p("fever.jsonl") +
                  " --alpha 0,0.1,0.2,0.3,0.4,0.5 --out " + p("e2")) == 0);
  CHECK(count_lines(p("e2/alpha_sweep.csv")) == 7);
  CHECK(read_file(p("e2/selective.csv")).find("Selective (\xCE\xB1=0)") != std::string::npos);

  std::ofstream(p("none.jsonl")) << "";
  CHECK(mma_cmd("eval --records " + p("none.jsonl") + " --out " + p("e3")) != 0);
  std::ofstream(p("broken.jsonl")) << "{\"question_id\":\"a\",\"gold\":\"x\",\"prediction\":\"x\"}\n{nope\n";
  CHECK(mma_cmd("eval --records " + p("broken.jsonl") + " --out " + p("e4")) == 2);
  CHECK(err_text().find("line 2") != std::string::npos);
  fs::remove_all(kRoot);
}
