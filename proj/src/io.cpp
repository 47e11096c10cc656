#include "mma/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mma {

namespace {

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void to_json(json& j, const VisualDescriptor& v) {
  j = json{{"scene_tags", v.scene_tags}, {"ambiguity", to_string(v.ambiguity)}};
  if (v.image_path) j["image_path"] = *v.image_path;
}

void from_json(const json& j, VisualDescriptor& v) {
  v.scene_tags = j.at("scene_tags").get<std::vector<std::string>>();
  v.ambiguity = parse_ambiguity(j.at("ambiguity").get<std::string>());
  v.image_path.reset();
  if (auto it = j.find("image_path"); it != j.end() && !it->is_null()) {
    v.image_path = it->get<std::string>();
  }
}

void to_json(json& j, const EvidenceRecord& e) {
  j = json{{"caption", e.caption}, {"visual_descriptor", e.visual},
           {"supports", to_string(e.supports)}};
}

void from_json(const json& j, EvidenceRecord& e) {
  e.caption = j.at("caption").get<std::string>();
  e.visual = j.at("visual_descriptor").get<VisualDescriptor>();
  e.supports = parse_supports(j.at("supports").get<std::string>());
}

void to_json(json& j, const Utterance& u) {
  j = json{{"speaker", to_string(u.speaker)}, {"text", u.text}, {"kind", to_string(u.kind)},
           {"topic", u.topic}};
  j["evidence"] = u.evidence ? json(*u.evidence) : json(nullptr);
  j["verifiable_outcome"] = u.verifiable_outcome ? json(*u.verifiable_outcome) : json(nullptr);
}

void from_json(const json& j, Utterance& u) {
  u.speaker = parse_speaker(j.at("speaker").get<std::string>());
  u.text = j.at("text").get<std::string>();
  u.kind = parse_utterance_kind(j.value("kind", std::string("CHITCHAT")));
  u.topic = j.value("topic", std::string());
  u.evidence.reset();
  u.verifiable_outcome.reset();
  if (auto it = j.find("evidence"); it != j.end() && !it->is_null()) {
    u.evidence = it->get<EvidenceRecord>();
  }
  if (auto it = j.find("verifiable_outcome"); it != j.end() && !it->is_null()) {
    u.verifiable_outcome = it->get<bool>();
  }
}

void to_json(json& j, const Session& s) {
  j = json{{"index", s.index}, {"timestamp", s.timestamp}, {"phase", to_string(s.phase)},
           {"utterances", s.utterances}};
}

void from_json(const json& j, Session& s) {
  s.index = j.at("index").get<int>();
  s.timestamp = j.at("timestamp").get<double>();
  s.phase = parse_phase(j.at("phase").get<std::string>());
  s.utterances = j.at("utterances").get<std::vector<Utterance>>();
}

void to_json(json& j, const FactSpec& f) {
  j = json{{"subject", f.subject},
           {"attribute", f.attribute},
           {"claimed_values", {{"USER_A", f.value_a}, {"USER_B", f.value_b}}},
           {"distractors", f.distractors},
           {"distractor_values", f.distractor_values}};
}

void from_json(const json& j, FactSpec& f) {
  f.subject = j.at("subject").get<std::string>();
  f.attribute = j.at("attribute").get<std::string>();
  f.value_a = j.at("claimed_values").at("USER_A").get<std::string>();
  f.value_b = j.at("claimed_values").at("USER_B").get<std::string>();
  f.distractors = j.at("distractors").get<std::vector<std::string>>();
  f.distractor_values = j.at("distractor_values").get<std::vector<std::string>>();
}

void to_json(json& j, const BenchCase& c) {
  j = json{{"case_id", c.case_id},
           {"logic_type", to_string(c.logic_type)},
           {"seed", c.seed},
           {"sessions", c.sessions},
           {"target_fact", c.target},
           {"ground_truth", to_string(c.ground_truth)},
           {"signals", {{"text", to_string(c.signal_text)}, {"vision", to_string(c.signal_vision)}}}};
}

void from_json(const json& j, BenchCase& c) {
  c.case_id = j.at("case_id").get<std::string>();
  c.logic_type = parse_logic_type(j.at("logic_type").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.sessions = j.at("sessions").get<std::vector<Session>>();
  c.target = j.at("target_fact").get<FactSpec>();
  c.ground_truth = parse_verdict(j.at("ground_truth").get<std::string>());
  c.signal_text = parse_verdict(j.at("signals").at("text").get<std::string>());
  c.signal_vision = parse_verdict(j.at("signals").at("vision").get<std::string>());
}

void to_json(json& j, const BenchConfig& c) {
  j = json{{"reliability_a", c.reliability_a}, {"reliability_b", c.reliability_b},
           {"noise_utterances", c.noise_utterances}, {"epoch", c.epoch},
           {"span_days", c.span_days}};
}

void from_json(const json& j, BenchConfig& c) {
  get_if_present(j, "reliability_a", c.reliability_a);
  get_if_present(j, "reliability_b", c.reliability_b);
  get_if_present(j, "noise_utterances", c.noise_utterances);
  get_if_present(j, "epoch", c.epoch);
  get_if_present(j, "span_days", c.span_days);
}

void to_json(json& j, const QaItem& q) {
  j = json{{"question_id", q.question_id}, {"case_id", q.case_id},
           {"dimension", to_string(q.dimension)}, {"question", q.question},
           {"gold", q.gold}, {"topic", q.topic}};
}

void from_json(const json& j, QaItem& q) {
  q.question_id = j.at("question_id").get<std::string>();
  q.case_id = j.at("case_id").get<std::string>();
  q.dimension = parse_qa_dimension(j.at("dimension").get<std::string>());
  q.question = j.at("question").get<std::string>();
  q.gold = j.at("gold").get<std::string>();
  q.topic = j.value("topic", std::string());
}

void to_json(json& j, const Wagers& w) {
  j = json::object();
  for (auto o : {WagerOption::kTrue, WagerOption::kFalse, WagerOption::kUnknown,
                 WagerOption::kReserve}) {
    j[std::string(to_string(o))] = w[o];
  }
}

void from_json(const json& j, Wagers& w) {
  if (!j.is_object()) throw std::invalid_argument("wagers must be an object");
  w = Wagers{};
  for (const auto& [key, value] : j.items()) {
    const auto option = parse_wager_option(key);
    if (!value.is_number_integer()) {
      throw std::invalid_argument("wager on " + key + " is not an integer");
    }
    w[option] = value.get<int>();
  }
}

void to_json(json& j, const ProbeTranscript& t) {
  j = json{{"case_id", t.case_id},
           {"mode", to_string(t.mode)},
           {"step1_verdict", to_string(t.step1_verdict)},
           {"step2_wagers", t.step2_wagers},
           {"step3_verdict", to_string(t.step3_verdict)},
           {"confessed_error", t.confessed_error},
           {"rationales", t.rationales}};
}

void from_json(const json& j, ProbeTranscript& t) {
  t.case_id = j.at("case_id").get<std::string>();
  t.mode = parse_mode(j.at("mode").get<std::string>());
  t.step1_verdict = parse_verdict(j.at("step1_verdict").get<std::string>());
  t.step2_wagers = j.at("step2_wagers").get<Wagers>();
  t.step3_verdict = parse_verdict(j.at("step3_verdict").get<std::string>());
  t.confessed_error = j.at("confessed_error").get<bool>();
  t.rationales = {};
  if (auto it = j.find("rationales"); it != j.end() && !it->is_null()) {
    const auto r = it->get<std::vector<std::string>>();
    for (std::size_t i = 0; i < r.size() && i < 3; ++i) t.rationales[i] = r[i];
  }
}

void to_json(json& j, const CoreParams& p) { j = json{{"beta", p.beta}, {"gamma", p.gamma}}; }

void to_json(json& j, const ProbeReport& r) {
  j = json::object();
  j["params"] = r.params;
  j["verdict_step"] = r.verdict_step == VerdictStep::kFinal ? "step3" : "step1";
  j["entropy_source"] = "wager distribution (nats)";
  j["delta_h_rel"] = r.delta_h_rel ? json(r.delta_h_rel->value) : json(nullptr);
  j["delta_h_rel_degenerate"] = r.delta_h_rel ? json(r.delta_h_rel->degenerate) : json(nullptr);
  json modes = json::array();
  for (const auto& m : r.modes) {
    json jm;
    jm["mode"] = to_string(m.mode);
    jm["n"] = m.n;
    jm["core_accuracy"] = optional_number(m.core_accuracy);
    jm["verdict_accuracy"] = optional_number(m.verdict_accuracy());
    jm["core_score"] = optional_number(m.mean_core());
    jm["type_b_accuracy"] = optional_number(m.of(LogicType::kInversion).verdict_accuracy());
    jm["type_d_score"] = optional_number(m.of(LogicType::kUnknowable).mean_core());
    jm["scr"] = optional_number(m.scr);
    jm["fcr"] = optional_number(m.fcr);
    jm["logic_collapse"] = m.logic_collapse;
    jm["mean_wager_entropy"] = optional_number(m.mean_entropy());
    json msa;
    for (auto c : {MsaClass::kTextDominant, MsaClass::kVisionDominant, MsaClass::kConfusion}) {
      msa[std::string(to_string(c))] = m.msa_counts[static_cast<std::size_t>(c)];
    }
    jm["msa"] = msa;
    json types;
    for (auto t : {LogicType::kStandard, LogicType::kInversion, LogicType::kAmbiguity,
                   LogicType::kUnknowable}) {
      const auto& b = m.of(t);
      types[std::string(to_string(t))] = {{"n", b.n},
                                          {"verdict_accuracy", optional_number(b.verdict_accuracy())},
                                          {"core_score", optional_number(b.mean_core())}};
    }
    jm["by_type"] = types;
    modes.push_back(std::move(jm));
  }
  j["modes"] = modes;
}

void to_json(json& j, const ConfidenceConfig& c) {
  j = json{{"weights",
            {{"source", c.weights.source}, {"time", c.weights.time},
             {"consensus", c.weights.consensus}}},
           {"mask", c.weights.mask.name()},
           {"half_life_days", c.temporal.half_life_seconds / kSecondsPerDay},
           {"tau", c.abstain.tau},
           {"conflict_veto", c.abstain.conflict_veto},
           {"neighbors", c.consensus.neighbors},
           {"rounds", c.consensus.rounds},
           {"edge_weighting", to_string(c.consensus.weighting)}};
}

void from_json(const json& j, ConfidenceConfig& c) {
  if (auto it = j.find("weights"); it != j.end()) {
    get_if_present(*it, "source", c.weights.source);
    get_if_present(*it, "time", c.weights.time);
    get_if_present(*it, "consensus", c.weights.consensus);
  }
  if (auto it = j.find("mask"); it != j.end()) {
    c.weights.mask = ComponentMask::parse(it->get<std::string>());
  }
  if (auto it = j.find("half_life_days"); it != j.end()) {
    c.temporal.half_life_seconds = it->get<double>() * kSecondsPerDay;
  }
  get_if_present(j, "tau", c.abstain.tau);
  get_if_present(j, "conflict_veto", c.abstain.conflict_veto);
  get_if_present(j, "neighbors", c.consensus.neighbors);
  get_if_present(j, "rounds", c.consensus.rounds);
  if (auto it = j.find("edge_weighting"); it != j.end()) {
    c.consensus.weighting = parse_edge_weighting(it->get<std::string>());
  }
  c.weights.validate();
  if (!(c.temporal.half_life_seconds > 0.0)) throw std::invalid_argument("half_life_days must be > 0");
  if (!(c.abstain.tau >= 0.0 && c.abstain.tau <= 1.0)) throw std::invalid_argument("tau must lie in [0,1]");
  if (c.consensus.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
}

void to_json(json& j, const ConfidenceReport& r) {
  j = json{{"id", r.id},
           {"similarity", r.similarity},
           {"S", r.source},
           {"T", r.time},
           {"C_con", r.consensus},
           {"base", r.base},
           {"combined", r.combined},
           {"neighbor_ids", r.neighbor_ids},
           {"future_timestamp", r.future_timestamp},
           {"no_consensus_evidence", r.no_consensus_evidence},
           {"consensus_masked", r.consensus_masked}};
}

void to_json(json& j, const AgentConfig& c) {
  j = json{{"confidence", c.confidence},
           {"k", c.k},
           {"mode", to_string(c.mode)},
           {"dimension", c.dimension},
           {"laplace", c.laplace},
           {"wager_policy", c.wager_policy_name}};
}

void to_json(json& j, const AuditEntry& a) {
  json stances = json::array();
  for (const auto& [id, v] : a.stances) stances.push_back({{"id", id}, {"stance", to_string(v)}});
  j = json{{"case_id", a.case_id},
           {"mode", to_string(a.mode)},
           {"mask", a.mask},
           {"step", a.step},
           {"rounds", a.rounds},
           {"reports", a.reports},
           {"stances", stances},
           {"decision", a.decision.reason_string()},
           {"top_id", a.decision.top ? json(a.decision.top->id) : json(nullptr)},
           {"top_confidence", a.decision.top ? json(a.decision.top->combined) : json(nullptr)},
           {"verdict", to_string(a.verdict)}};
}

void to_json(json& j, const QaAnswer& a) {
  j = json{{"question_id", a.question_id}, {"case_id", a.case_id}, {"mode", to_string(a.mode)},
           {"answer", a.answer}};
}

void from_json(const json& j, QaAnswer& a) {
  a.question_id = j.at("question_id").get<std::string>();
  a.case_id = j.value("case_id", std::string());
  a.mode = parse_mode(j.value("mode", std::string("TEXT")));
  a.answer = j.at("answer").get<std::string>();
}

void to_json(json& j, const EvalRecord& r) {
  j = json{{"question_id", r.question_id}, {"gold", r.gold},
           {"prediction", r.prediction ? json(*r.prediction) : json(nullptr)},
           {"regime", to_string(r.regime)}};
  if (r.confidence) j["confidence"] = *r.confidence;
  if (r.category) j["category"] = *r.category;
  if (r.llm_score) j["llm_score"] = *r.llm_score;
}

void from_json(const json& j, EvalRecord& r) {
  r.question_id = j.at("question_id").get<std::string>();
  r.gold = j.at("gold").get<std::string>();
  r.prediction.reset();
  if (auto it = j.find("prediction"); it != j.end() && !it->is_null()) {
    r.prediction = it->get<std::string>();
  }
  if (j.value("abstain", false)) r.prediction.reset();
  if (auto it = j.find("regime"); it != j.end()) r.regime = parse_regime(it->get<std::string>());
  r.confidence.reset();
  r.category.reset();
  r.llm_score.reset();
  if (auto it = j.find("confidence"); it != j.end() && !it->is_null()) {
    r.confidence = it->get<double>();
  }
  if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
    r.category = it->get<std::string>();
  }
  if (auto it = j.find("llm_score"); it != j.end() && !it->is_null()) {
    r.llm_score = it->get<double>();
  }
}

void to_json(json& j, const SelectiveSummary& s) {
  j = json{{"regime", to_string(s.regime)},
           {"N", s.n},
           {"answered_correct", s.answered_correct},
           {"answered_wrong", s.answered_wrong},
           {"correct_abstain", s.correct_abstain},
           {"wrong_abstain", s.wrong_abstain},
           {"raw_acc", s.raw_accuracy()},
           {"actionable_acc", optional_number(s.actionable_accuracy())},
           {"abstain_rate", s.abstain_rate()},
           {"abstain_precision", optional_number(s.abstain_precision())}};
}

CaseTruth truth_of(const BenchCase& c) {
  return {c.case_id, c.logic_type, c.ground_truth, c.signal_text, c.signal_vision};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mma
