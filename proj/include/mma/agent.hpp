#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mma/bench.hpp"
#include "mma/confidence.hpp"
#include "mma/memory.hpp"
#include "mma/probe.hpp"

namespace mma {

// Maps the chosen verdict and its confidence to a 100-point split. Must always
// return valid wagers.
using WagerPolicy = std::function<Wagers(Verdict verdict, double confidence)>;

// reserve = round(100 (1 - confidence)), the rest on the verdict; an UNKNOWN
// verdict puts everything in reserve.
Wagers linear_wager(Verdict verdict, double confidence);

// The agent probes 40 days after the trap session. With a 30-day half-life a
// claim that old cannot clear tau = 0.5 under equal weights, so the agent
// defaults to a slower decay.
inline constexpr double kAgentHalfLifeDays = 60.0;

inline ConfidenceConfig agent_confidence_defaults() {
  ConfidenceConfig c;
  c.temporal.half_life_seconds = kAgentHalfLifeDays * kSecondsPerDay;
  return c;
}

struct AgentConfig {
  ConfidenceConfig confidence = agent_confidence_defaults();
  std::size_t k = 12;  // retrieval depth
  Mode mode = Mode::kText;
  std::size_t dimension = 256;
  double laplace = 1.0;  // smoothing for calibration-learned priors
  WagerPolicy wager_policy = linear_wager;
  std::string wager_policy_name = "linear";
};

struct CalibrationTally {
  int events = 0;
  int came_true = 0;
};

struct IngestResult {
  MemoryStore store;
  std::map<Speaker, CalibrationTally> calibration;
};

// One item per utterance plus one per evidence record; source ids are speaker
// ids and priors are learned from calibration outcomes with Laplace smoothing
// (true + k) / (events + 2k).
IngestResult ingest_case(const BenchCase& c, Mode mode, std::size_t dimension = 256,
                         double laplace = 1.0);

std::string item_id(int session, int utterance);
std::string evidence_item_id(int session, int utterance);

// Stance of a text toward "value_b holds": TRUE if it names the subject and
// only value_b, FALSE if only value_a, nullopt otherwise.
std::optional<Verdict> read_stance(const FactSpec& fact, std::string_view text);

std::string probe_query(const FactSpec& fact);

struct AuditEntry {
  std::string case_id;
  Mode mode = Mode::kText;
  std::string mask;
  int step = 1;  // 1 or 3
  int rounds = 1;
  std::vector<ConfidenceReport> reports;  // reranked
  std::vector<std::pair<std::string, Verdict>> stances;  // evidence-bearing items
  Decision decision;
  Verdict verdict = Verdict::kUnknown;
};

struct AgentRun {
  ProbeTranscript transcript;
  std::vector<AuditEntry> audit;
};

AgentRun run_reference_agent(const BenchCase& c, const AgentConfig& cfg);

struct QaAnswer {
  std::string question_id;
  std::string case_id;
  Mode mode = Mode::kText;
  std::string answer;
};

// Retrieval-only reader for Layer-1 questions (no confidence weighting).
QaAnswer answer_layer1(const BenchCase& c, const IngestResult& ingested, const QaItem& q,
                       Mode mode, std::size_t k);

double layer1_accuracy(const std::vector<QaItem>& questions, const std::vector<QaAnswer>& answers);

struct ReplayError {
  int line = 0;
  std::string message;
};

struct ReplayResult {
  std::vector<ProbeTranscript> transcripts;
  std::vector<ReplayError> errors;
  std::vector<std::string> warnings;
};

// Parses and validates every line; bad lines are reported, never dropped
// silently.
ReplayResult replay_transcripts(std::istream& in);
ReplayResult replay_transcripts_file(const std::string& path);

}  // namespace mma
