// mma: generate benchmark suites, run the reference agent, score probe
// transcripts and compute selective-prediction tables.
//
// Exit codes: 0 success, 1 input error, 2 validation failure.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mma/agent.hpp"
#include "mma/bench.hpp"
#include "mma/io.hpp"
#include "mma/probe.hpp"
#include "mma/selective.hpp"

namespace fs = std::filesystem;
using namespace mma;

namespace {

constexpr int kInputError = 1;
constexpr int kValidationError = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CliError{code, message}; }

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

// Explicit path wins; otherwise <$MMA_CONFIG_DIR>/<name> when it exists.
std::optional<std::string> config_path(const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) {
    if (!fs::exists(explicit_path)) fail(kInputError, "config file not found: " + explicit_path);
    return explicit_path;
  }
  if (const char* dir = std::getenv("MMA_CONFIG_DIR")) {
    const fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  return std::nullopt;
}

json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const std::exception& e) {
    fail(kInputError, path + ": " + e.what());
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(kInputError, "cannot create directory " + dir);
}

void write_out(const fs::path& path, const std::string& content) {
  try {
    write_file_atomic(path.string(), content);
  } catch (const std::exception& e) {
    fail(kInputError, e.what());
  }
}

json provenance(const json& config) {
  return json{{"tool", "mma"}, {"version", kToolVersion}, {"config", config}};
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 7;
  std::string types = "A:1,B:1,C:1,D:1";
  std::string out;
  std::string config;
  std::optional<int> noise;
};

int cmd_gen(const GenArgs& a) {
  BenchConfig bc;
  if (auto p = config_path(a.config, "bench.json")) from_json(load_json(*p), bc);
  if (a.noise) bc.noise_utterances = *a.noise;
  SuiteCounts counts;
  try {
    counts = SuiteCounts::parse(a.types);
  } catch (const std::exception& e) {
    fail(kInputError, e.what());
  }
  if (counts.total() == 0) warn("all type counts are zero; writing an empty suite");

  const auto cases = generate_suite(a.seed, counts, bc);
  for (const auto& c : cases) {
    const auto violations = validate_case(c, std::min(bc.noise_utterances, 20));
    if (!violations.empty()) {
      std::string msg = "generated case " + c.case_id + " is invalid:";
      for (const auto& v : violations) msg += "\n  " + v;
      fail(kValidationError, msg);
    }
  }

  ensure_dir(a.out);
  ensure_dir((fs::path(a.out) / "cases").string());
  std::string manifest;
  std::vector<QaItem> qa;
  for (const auto& c : cases) {
    const std::string rel = "cases/" + c.case_id + ".json";
    write_out(fs::path(a.out) / rel, json(c).dump(2) + "\n");
    manifest += json{{"case_id", c.case_id},
                     {"logic_type", to_string(c.logic_type)},
                     {"seed", c.seed},
                     {"file", rel}}
                    .dump() +
                "\n";
    for (auto& q : layer1_questions(c)) qa.push_back(std::move(q));
  }
  write_out(fs::path(a.out) / "manifest.jsonl", manifest);
  write_out(fs::path(a.out) / "qa.jsonl", to_jsonl(qa));
  json snap = {{"seed", a.seed},
               {"types", {{"A", counts.standard}, {"B", counts.inversion},
                          {"C", counts.ambiguity}, {"D", counts.unknowable}}},
               {"bench", bc}};
  write_out(fs::path(a.out) / "suite.json", provenance(snap).dump(2) + "\n");
  std::cout << "wrote " << cases.size() << " cases and " << qa.size() << " questions to " << a.out
            << '\n';
  return 0;
}

// ---- suite loading -----------------------------------------------------------

std::vector<BenchCase> load_suite(const std::string& dir) {
  const fs::path manifest = fs::path(dir) / "manifest.jsonl";
  if (!fs::exists(manifest)) fail(kInputError, "suite not found: " + manifest.string());
  const auto rows = parse_jsonl<json>(read_file(manifest.string()));
  if (!rows.errors.empty()) {
    std::string msg = "malformed manifest " + manifest.string() + ":";
    for (const auto& [line, err] : rows.errors) msg += "\n  line " + std::to_string(line) + ": " + err;
    fail(kValidationError, msg);
  }
  std::vector<BenchCase> cases;
  int line = 0;
  for (const auto& row : rows.values) {
    ++line;
    const auto file = fs::path(dir) / row.value("file", std::string());
    if (!fs::exists(file)) fail(kInputError, "case file missing: " + file.string());
    try {
      auto c = json::parse(read_file(file.string())).get<BenchCase>();
      const auto violations = validate_case(c, 0);
      if (!violations.empty()) {
        std::string msg = file.string() + " fails validation:";
        for (const auto& v : violations) msg += "\n  " + v;
        fail(kValidationError, msg);
      }
      cases.push_back(std::move(c));
    } catch (const CliError&) {
      throw;
    } catch (const std::exception& e) {
      fail(kValidationError, file.string() + ": " + e.what());
    }
  }
  return cases;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string suite;
  std::string out;
  std::optional<std::string> mask;  // config file, else full
  std::string mode = "text";
  std::string config;
  std::optional<std::size_t> k;
  std::optional<double> half_life_days;
  std::optional<double> tau;
  std::optional<int> rounds;
  std::optional<std::string> weighting;
};

int cmd_run(const RunArgs& a) {
  AgentConfig cfg;
  if (auto p = config_path(a.config, "agent.json")) {
    const json j = load_json(*p);
    try {
      if (auto it = j.find("confidence"); it != j.end()) from_json(*it, cfg.confidence);
      cfg.k = j.value("k", cfg.k);
      cfg.dimension = j.value("dimension", cfg.dimension);
      cfg.laplace = j.value("laplace", cfg.laplace);
    } catch (const std::exception& e) {
      fail(kInputError, *p + ": " + e.what());
    }
  }
  std::vector<Mode> modes;
  try {
    if (a.mask) cfg.confidence.weights.mask = ComponentMask::parse(*a.mask);
    if (a.mode == "both") {
      modes = {Mode::kText, Mode::kVision};
    } else {
      modes = {parse_mode(a.mode)};
    }
    if (a.k) cfg.k = *a.k;
    if (a.half_life_days) cfg.confidence.temporal.half_life_seconds = *a.half_life_days * kSecondsPerDay;
    if (a.tau) cfg.confidence.abstain.tau = *a.tau;
    if (a.rounds) cfg.confidence.consensus.rounds = *a.rounds;
    if (a.weighting) cfg.confidence.consensus.weighting = parse_edge_weighting(*a.weighting);
    from_json(json(cfg.confidence), cfg.confidence);  // validates
    if (cfg.k == 0) throw std::invalid_argument("k must be >= 1");
  } catch (const std::exception& e) {
    fail(kInputError, e.what());
  }

  const auto cases = load_suite(a.suite);
  if (cases.empty()) warn("suite " + a.suite + " has no cases; writing empty outputs");

  std::vector<ProbeTranscript> transcripts;
  std::vector<AuditEntry> audit;
  std::vector<QaAnswer> answers;
  for (Mode mode : modes) {
    cfg.mode = mode;
    for (const auto& c : cases) {
      auto r = run_reference_agent(c, cfg);
      transcripts.push_back(std::move(r.transcript));
      for (auto& e : r.audit) audit.push_back(std::move(e));
      const auto ingested = ingest_case(c, mode, cfg.dimension, cfg.laplace);
      for (const auto& q : layer1_questions(c)) {
        answers.push_back(answer_layer1(c, ingested, q, mode, cfg.k));
      }
    }
  }

  ensure_dir(a.out);
  write_out(fs::path(a.out) / "transcripts.jsonl", to_jsonl(transcripts));
  write_out(fs::path(a.out) / "audit.jsonl", to_jsonl(audit));
  write_out(fs::path(a.out) / "qa_answers.jsonl", to_jsonl(answers));
  json snap = {{"agent", cfg}, {"suite", a.suite}, {"modes", json::array()}};
  snap["agent"].erase("mode");
  for (Mode m : modes) snap["modes"].push_back(to_string(m));
  write_out(fs::path(a.out) / "config.json", provenance(snap).dump(2) + "\n");
  std::cout << "wrote " << transcripts.size() << " transcripts to " << a.out << '\n';
  return 0;
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string suite;
  std::string transcripts;
  std::string answers;
  std::string out;
  std::string method = "reference";
  std::string step = "final";
  double beta = 0.5;
  double gamma = 1.0;
};

int cmd_score(const ScoreArgs& a) {
  CoreParams params{a.beta, a.gamma};
  VerdictStep step = VerdictStep::kFinal;
  try {
    params.validate();
    if (a.step == "initial" || a.step == "step1") {
      step = VerdictStep::kInitial;
    } else if (a.step != "final" && a.step != "step3") {
      throw std::invalid_argument("--step must be initial or final");
    }
  } catch (const std::exception& e) {
    fail(kInputError, e.what());
  }
  const auto cases = load_suite(a.suite);
  if (!fs::exists(a.transcripts)) fail(kInputError, "transcripts not found: " + a.transcripts);
  const auto replay = replay_transcripts_file(a.transcripts);
  for (const auto& w : replay.warnings) warn(a.transcripts + ": " + w);
  if (!replay.errors.empty()) {
    std::string msg = a.transcripts + ": " + std::to_string(replay.errors.size()) + " bad line(s)";
    for (const auto& e : replay.errors) msg += "\n  line " + std::to_string(e.line) + ": " + e.message;
    fail(kValidationError, msg);
  }

  std::map<std::string, CaseTruth> truth;
  for (const auto& c : cases) truth.emplace(c.case_id, truth_of(c));
  std::vector<ScoredCase> scored;
  for (const auto& t : replay.transcripts) {
    auto it = truth.find(t.case_id);
    if (it == truth.end()) fail(kValidationError, "transcript for unknown case " + t.case_id);
    scored.push_back(score_case(t, it->second, params));
  }

  std::map<Mode, double> core_accuracy;
  if (!a.answers.empty()) {
    if (!fs::exists(a.answers)) fail(kInputError, "answers not found: " + a.answers);
    const auto parsed = parse_jsonl<QaAnswer>(read_file(a.answers));
    if (!parsed.errors.empty()) {
      std::string msg = a.answers + ": malformed answers";
      for (const auto& [line, err] : parsed.errors) msg += "\n  line " + std::to_string(line) + ": " + err;
      fail(kValidationError, msg);
    }
    std::vector<QaItem> questions;
    for (const auto& c : cases) {
      for (auto& q : layer1_questions(c)) questions.push_back(std::move(q));
    }
    for (Mode m : {Mode::kText, Mode::kVision}) {
      std::vector<QaAnswer> of_mode;
      for (const auto& ans : parsed.values) {
        if (ans.mode == m) of_mode.push_back(ans);
      }
      if (!of_mode.empty() && !questions.empty()) core_accuracy[m] = layer1_accuracy(questions, of_mode);
    }
  }

  const auto report = aggregate_report(scored, params, step, core_accuracy);
  ensure_dir(a.out);
  json snap = {{"suite", a.suite}, {"transcripts", a.transcripts}, {"method", a.method},
               {"params", params}};
  json doc = provenance(snap);
  doc["report"] = report;
  write_out(fs::path(a.out) / "report.json", doc.dump(2) + "\n");
  char header[160];
  std::snprintf(header, sizeof header, "# mma %s beta=%g gamma=%g step=%s\n", kToolVersion,
                params.beta, params.gamma, step == VerdictStep::kFinal ? "final" : "initial");
  write_out(fs::path(a.out) / "table.csv", header + probe_report_csv(report, a.method));
  std::cout << probe_report_csv(report, a.method);
  return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> records;
  std::string regime = "label_abstain";
  std::vector<double> alphas{0.2};
  double lambda = 1.0;
  double r = 0.2;
  std::string method = "method";
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  Regime regime;
  try {
    regime = parse_regime(a.regime);
    for (double al : a.alphas) {
      if (!(al >= 0.0 && al <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    }
    if (!(a.lambda >= 0.0) || !(a.r >= 0.0)) throw std::invalid_argument("lambda and r must be >= 0");
  } catch (const std::exception& e) {
    fail(kInputError, e.what());
  }

  std::vector<std::vector<EvalRecord>> seeds;
  for (const auto& path : a.records) {
    if (!fs::exists(path)) fail(kInputError, "records not found: " + path);
    // Records without a regime field take the one given on the command line.
    auto parsed = parse_jsonl<json>(read_file(path));
    std::vector<EvalRecord> recs;
    for (std::size_t i = 0; i < parsed.values.size(); ++i) {
      auto& j = parsed.values[i];
      if (!j.contains("regime")) j["regime"] = to_string(regime);
      try {
        recs.push_back(j.get<EvalRecord>());
      } catch (const std::exception& e) {
        parsed.errors.emplace_back(parsed.lines[i], e.what());
      }
    }
    std::sort(parsed.errors.begin(), parsed.errors.end());
    if (!parsed.errors.empty()) {
      std::string msg = path + ": malformed records";
      for (const auto& [ln, err] : parsed.errors) msg += "\n  line " + std::to_string(ln) + ": " + err;
      fail(kValidationError, msg);
    }
    if (recs.empty()) fail(kInputError, path + ": no records");
    for (const auto& rec : recs) {
      if (rec.regime != regime) {
        fail(kValidationError, path + ": record " + rec.question_id + " has regime " +
                                   std::string(to_string(rec.regime)));
      }
    }
    seeds.push_back(std::move(recs));
  }
  if (seeds.empty()) fail(kInputError, "no record files given");

  std::vector<SelectiveSummary> per_seed;
  std::vector<EvalRecord> pooled;
  for (const auto& s : seeds) {
    per_seed.push_back(summarize(s));
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  const auto avg = average_summaries(per_seed);

  ensure_dir(a.out);
  json snap = {{"records", a.records}, {"regime", to_string(regime)}, {"alphas", a.alphas},
               {"lambda", a.lambda}, {"r", a.r}, {"method", a.method}};
  json doc = provenance(snap);
  doc["summary"] = avg;
  doc["per_seed"] = per_seed;

  if (regime == Regime::kLabelAbstain) {
    std::optional<Stability> stab;
    if (per_seed.size() >= 2) {
      std::vector<double> acc;
      for (const auto& s : per_seed) acc.push_back(s.raw_accuracy() * 100.0);
      stab = stability(acc);
      doc["stability"] = {{"mean", stab->mean}, {"std", stab->std}};
    }
    write_out(fs::path(a.out) / "selective.csv", selective_table_csv(a.method, avg, a.alphas.front(), stab));
    write_out(fs::path(a.out) / "alpha_sweep.csv", alpha_sweep_csv(avg, a.alphas));
    json scores = json::object();
    for (double al : a.alphas) {
      std::ostringstream key;
      key << al;
      scores[key.str()] = selective_score(avg, al);
    }
    doc["selective_score"] = scores;
  } else {
    write_out(fs::path(a.out) / "coverage.csv", coverage_table_csv(a.method, pooled, avg, a.lambda, a.r));
    doc["utility"] = utility(avg, a.lambda, a.r);
  }
  write_out(fs::path(a.out) / "risk_coverage.csv", risk_coverage_csv(risk_coverage(pooled)));
  write_out(fs::path(a.out) / "summary.json", doc.dump(2) + "\n");
  std::cout << doc["summary"].dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mma: confidence-aware memory benchmark tools"};
  app.set_version_flag("--version", std::string("mma ") + kToolVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a benchmark suite");
  g->add_option("--seed", gen.seed, "Suite seed");
  g->add_option("--types", gen.types, "Cases per type, e.g. A:1,B:17");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--config", gen.config, "Bench config JSON (default: $MMA_CONFIG_DIR/bench.json)");
  g->add_option("--noise", gen.noise, "Distractor utterances in the noise phase");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run the reference agent over a suite");
  r->add_option("--suite", run.suite, "Suite directory")->required();
  r->add_option("--out", run.out, "Results directory")->required();
  r->add_option("--mask", run.mask, "full, st, tc, cs or a '+' list of components");
  r->add_option("--mode", run.mode, "text, vision or both");
  r->add_option("--config", run.config, "Agent config JSON (default: $MMA_CONFIG_DIR/agent.json)");
  r->add_option("--k", run.k, "Retrieval depth");
  r->add_option("--half-life-days", run.half_life_days, "Temporal half-life in days");
  r->add_option("--tau", run.tau, "Abstention threshold");
  r->add_option("--rounds", run.rounds, "Consensus rounds for step 1");
  r->add_option("--edge-weighting", run.weighting, "uniform or abs_similarity");

  ScoreArgs score;
  auto* s = app.add_subcommand("score", "Score probe transcripts");
  s->add_option("--suite", score.suite, "Suite directory")->required();
  s->add_option("--transcripts", score.transcripts, "Transcripts JSONL")->required();
  s->add_option("--answers", score.answers, "Layer-1 answers JSONL");
  s->add_option("--out", score.out, "Report directory")->required();
  s->add_option("--method", score.method, "Method name for the table");
  s->add_option("--step", score.step, "Verdict used for accuracy: final or initial");
  s->add_option("--beta", score.beta, "CoRe verdict weight");
  s->add_option("--gamma", score.gamma, "CoRe commitment penalty");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Selective-prediction metrics over answer/abstain records");
  e->add_option("--records", ev.records, "Records JSONL, one file per seed")->required();
  e->add_option("--regime", ev.regime, "label_abstain or coverage");
  e->add_option("--alpha", ev.alphas, "Abstention rewards; the first one is tabulated")->delimiter(',');
  e->add_option("--lambda", ev.lambda, "Wrong-answer penalty");
  e->add_option("--r", ev.r, "Abstention reward for utility");
  e->add_option("--method", ev.method, "Method name for the tables");
  e->add_option("--out", ev.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*r) return cmd_run(run);
    if (*s) return cmd_score(score);
    if (*e) return cmd_eval(ev);
  } catch (const CliError& err) {
    std::cerr << "error: " << err.message << '\n';
    return err.code;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kInputError;
  }
  return 0;
}
