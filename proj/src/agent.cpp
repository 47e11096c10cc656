#include "mma/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mma/io.hpp"

namespace mma {

Wagers linear_wager(Verdict verdict, double confidence) {
  Wagers w;
  if (verdict == Verdict::kUnknown) {
    w[WagerOption::kReserve] = 100;
    return w;
  }
  const double c = std::clamp(confidence, 0.0, 1.0);
  const int reserve = static_cast<int>(std::lround(100.0 * (1.0 - c)));
  w[WagerOption::kReserve] = reserve;
  w[wager_option_for(verdict)] = 100 - reserve;
  return w;
}

std::string item_id(int session, int utterance) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%02d-u%02d", session, utterance);
  return buf;
}

std::string evidence_item_id(int session, int utterance) {
  return item_id(session, utterance) + "-ev";
}

IngestResult ingest_case(const BenchCase& c, Mode mode, std::size_t dimension, double laplace) {
  if (!(laplace >= 0.0)) throw std::invalid_argument("ingest_case: laplace must be >= 0");
  IngestResult out{MemoryStore(dimension), {}};
  for (const auto& s : c.sessions) {
    for (const auto& u : s.utterances) {
      if (u.kind != UtteranceKind::kPrediction || !u.verifiable_outcome) continue;
      auto& tally = out.calibration[u.speaker];
      ++tally.events;
      tally.came_true += *u.verifiable_outcome ? 1 : 0;
    }
  }
  for (const auto& [speaker, tally] : out.calibration) {
    const double denom = tally.events + 2.0 * laplace;
    if (denom > 0.0) {
      out.store.registry().set(std::string(to_string(speaker)), (tally.came_true + laplace) / denom);
    }
  }
  for (const auto& s : c.sessions) {
    int n = 0;
    for (const auto& u : s.utterances) {
      ++n;
      const std::string source(to_string(u.speaker));
      out.store.add({item_id(s.index, n), u.text, embed_text(u.text, dimension), source,
                     s.timestamp, Modality::kText});
      if (u.evidence) {
        const auto content = u.evidence->render(mode);
        out.store.add({evidence_item_id(s.index, n), content, embed_text(content, dimension),
                       source, s.timestamp,
                       mode == Mode::kVision ? Modality::kVisionCaption : Modality::kText});
      }
    }
  }
  return out;
}

std::optional<Verdict> read_stance(const FactSpec& fact, std::string_view text) {
  const auto tokens = tokenize(text);
  const std::set<std::string> present(tokens.begin(), tokens.end());
  for (const auto& t : tokenize(fact.subject)) {
    if (!present.count(t)) return std::nullopt;
  }
  const bool a = present.count(normalize_answer(fact.value_a)) > 0;
  const bool b = present.count(normalize_answer(fact.value_b)) > 0;
  if (a == b) return std::nullopt;
  return b ? Verdict::kTrue : Verdict::kFalse;
}

std::string probe_query(const FactSpec& fact) {
  return "Which is right: " + fact.statement(fact.subject, fact.value_a) + ", or " +
         fact.statement(fact.subject, fact.value_b) + "?";
}

namespace {

AuditEntry decide(const BenchCase& c, const MemoryStore& store, const Embedding& query,
                  const AgentConfig& cfg, const ConfidenceConfig& conf, int step) {
  AuditEntry a;
  a.case_id = c.case_id;
  a.mode = cfg.mode;
  a.mask = conf.weights.mask.name();
  a.step = step;
  a.rounds = conf.consensus.rounds;
  a.reports = rerank(score_all(store, query, cfg.k, conf));
  std::vector<ConfidenceReport> bearing;
  for (const auto& r : a.reports) {
    const auto* item = store.find(r.id);
    if (!item) continue;
    if (auto stance = read_stance(c.target, item->content)) {
      a.stances.emplace_back(r.id, *stance);
      bearing.push_back(r);
    }
  }
  a.decision = abstain_decision(bearing, conf.abstain);
  if (a.decision.answer && a.decision.top) {
    for (const auto& [id, stance] : a.stances) {
      if (id == a.decision.top->id) a.verdict = stance;
    }
  }
  return a;
}

std::string rationale(const AuditEntry& a) {
  char buf[64];
  std::string out = "step " + std::to_string(a.step) + " (R=" + std::to_string(a.rounds) +
                    "): " + a.decision.reason_string();
  if (a.decision.top) {
    std::snprintf(buf, sizeof buf, "%.6f", a.decision.top->combined);
    out += "; top " + a.decision.top->id + " confidence " + buf;
  }
  out += "; verdict " + std::string(to_string(a.verdict));
  return out;
}

}  // namespace

AgentRun run_reference_agent(const BenchCase& c, const AgentConfig& cfg) {
  if (c.sessions.empty()) throw std::invalid_argument("run_reference_agent: case has no sessions");
  const auto ingested = ingest_case(c, cfg.mode, cfg.dimension, cfg.laplace);
  ConfidenceConfig conf = cfg.confidence;
  conf.temporal.now = c.sessions.back().timestamp;
  const Embedding query = embed_text(probe_query(c.target), cfg.dimension);

  AgentRun run;
  auto first = decide(c, ingested.store, query, cfg, conf, 1);
  ConfidenceConfig reflect = conf;
  reflect.consensus.rounds = conf.consensus.rounds + 1;
  auto second = decide(c, ingested.store, query, cfg, reflect, 3);

  auto& t = run.transcript;
  t.case_id = c.case_id;
  t.mode = cfg.mode;
  t.step1_verdict = first.verdict;
  const double top = first.decision.top ? first.decision.top->combined : 0.0;
  t.step2_wagers = cfg.wager_policy(first.verdict, top);
  if (!t.step2_wagers.valid()) {
    throw std::logic_error("wager policy '" + cfg.wager_policy_name + "' returned invalid wagers");
  }
  t.step3_verdict = second.verdict;
  t.confessed_error = t.step3_verdict != t.step1_verdict;
  t.rationales[0] = rationale(first);
  t.rationales[1] = "wagers from " + cfg.wager_policy_name + " policy on confidence " +
                    std::to_string(top);
  t.rationales[2] = rationale(second);
  run.audit.push_back(std::move(first));
  run.audit.push_back(std::move(second));
  return run;
}

QaAnswer answer_layer1(const BenchCase& c, const IngestResult& ingested, const QaItem& q,
                       Mode mode, std::size_t k) {
  QaAnswer a{q.question_id, c.case_id, mode, "unknown"};
  const auto& store = ingested.store;
  auto hits = [&]() {
    return retrieve_topk(store, embed_text(q.question, store.dimension()),
                         std::min(k, store.size()));
  };
  auto tally = [&](Speaker s) {
    auto it = ingested.calibration.find(s);
    return it == ingested.calibration.end() ? CalibrationTally{} : it->second;
  };
  switch (q.dimension) {
    case QaDimension::kFactRetrieval: {
      const auto topic = normalize_answer(q.topic);
      for (const auto& h : hits()) {
        const auto text = normalize_answer(h.item->content);
        if (text.find(topic) == std::string::npos) continue;
        if (text.find("did take place") != std::string::npos) {
          a.answer = "yes";
          break;
        }
        if (text.find("was called off") != std::string::npos) {
          a.answer = "no";
          break;
        }
      }
      break;
    }
    case QaDimension::kLogicReasoning:
      a.answer = std::to_string(tally(q.topic == "USER_B" ? Speaker::kUserB : Speaker::kUserA).came_true);
      break;
    case QaDimension::kSourceAnalysis: {
      const auto& reg = store.registry();
      a.answer = reg.prior("USER_A") >= reg.prior("USER_B") ? "USER_A" : "USER_B";
      break;
    }
    case QaDimension::kAdversarialDistraction:
      for (const auto& h : hits()) {
        if (auto v = c.target.extract_value(q.topic, h.item->content)) {
          a.answer = *v;
          break;
        }
      }
      break;
  }
  return a;
}

double layer1_accuracy(const std::vector<QaItem>& questions, const std::vector<QaAnswer>& answers) {
  if (questions.empty()) throw std::invalid_argument("layer1_accuracy: no questions");
  std::map<std::string, std::string> by_id;
  for (const auto& a : answers) by_id[a.question_id] = normalize_answer(a.answer);
  int correct = 0;
  for (const auto& q : questions) {
    auto it = by_id.find(q.question_id);
    if (it != by_id.end() && it->second == normalize_answer(q.gold)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(questions.size());
}

ReplayResult replay_transcripts(std::istream& in) {
  ReplayResult out;
  std::set<std::pair<std::string, Mode>> seen;
  std::string row;
  int line = 0;
  int nonblank = 0;
  while (std::getline(in, row)) {
    ++line;
    if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++nonblank;
    try {
      auto t = json::parse(row).get<ProbeTranscript>();
      validate_transcript(t);
      if (!seen.emplace(t.case_id, t.mode).second) {
        throw std::invalid_argument("duplicate transcript for case " + t.case_id + " in mode " +
                                    std::string(to_string(t.mode)));
      }
      out.transcripts.push_back(std::move(t));
    } catch (const std::exception& e) {
      out.errors.push_back({line, e.what()});
    }
  }
  if (nonblank == 0) out.warnings.push_back("transcript input is empty");
  return out;
}

ReplayResult replay_transcripts_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return replay_transcripts(in);
}

}  // namespace mma
