#include "mma/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "mma/memory.hpp"

namespace mma {

std::string_view to_string(Speaker s) {
  switch (s) {
    case Speaker::kUserA:
      return "USER_A";
    case Speaker::kUserB:
      return "USER_B";
    case Speaker::kSystem:
      return "SYSTEM";
  }
  return "SYSTEM";
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kCalibration:
      return "CALIBRATION";
    case Phase::kNoise:
      return "NOISE";
    case Phase::kTrap:
      return "TRAP";
    case Phase::kResolution:
      return "RESOLUTION";
  }
  return "CALIBRATION";
}

std::string_view to_string(Ambiguity a) {
  switch (a) {
    case Ambiguity::kClear:
      return "CLEAR";
    case Ambiguity::kVague:
      return "VAGUE";
    case Ambiguity::kNone:
      return "NONE";
  }
  return "NONE";
}

std::string_view to_string(Supports s) {
  switch (s) {
    case Supports::kUserAClaim:
      return "USER_A_CLAIM";
    case Supports::kUserBClaim:
      return "USER_B_CLAIM";
    case Supports::kNeither:
      return "NEITHER";
  }
  return "NEITHER";
}

std::string_view to_string(UtteranceKind k) {
  switch (k) {
    case UtteranceKind::kChitChat:
      return "CHITCHAT";
    case UtteranceKind::kPrediction:
      return "PREDICTION";
    case UtteranceKind::kOutcome:
      return "OUTCOME";
    case UtteranceKind::kDistractor:
      return "DISTRACTOR";
    case UtteranceKind::kClaim:
      return "CLAIM";
    case UtteranceKind::kResolution:
      return "RESOLUTION";
  }
  return "CHITCHAT";
}

std::string_view to_string(QaDimension d) {
  switch (d) {
    case QaDimension::kFactRetrieval:
      return "fact_retrieval";
    case QaDimension::kLogicReasoning:
      return "logic_reasoning";
    case QaDimension::kSourceAnalysis:
      return "source_analysis";
    case QaDimension::kAdversarialDistraction:
      return "adversarial_distraction";
  }
  return "fact_retrieval";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::array<E, N>& values, const char* what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument(std::string("unknown ") + what + ": " + std::string(s));
}

}  // namespace

Speaker parse_speaker(std::string_view s) {
  return parse_enum(s, std::array{Speaker::kUserA, Speaker::kUserB, Speaker::kSystem}, "speaker");
}
Phase parse_phase(std::string_view s) {
  return parse_enum(
      s, std::array{Phase::kCalibration, Phase::kNoise, Phase::kTrap, Phase::kResolution},
      "phase");
}
Ambiguity parse_ambiguity(std::string_view s) {
  return parse_enum(s, std::array{Ambiguity::kClear, Ambiguity::kVague, Ambiguity::kNone},
                    "ambiguity");
}
Supports parse_supports(std::string_view s) {
  return parse_enum(
      s, std::array{Supports::kUserAClaim, Supports::kUserBClaim, Supports::kNeither},
      "supports");
}
UtteranceKind parse_utterance_kind(std::string_view s) {
  return parse_enum(s,
                    std::array{UtteranceKind::kChitChat, UtteranceKind::kPrediction,
                               UtteranceKind::kOutcome, UtteranceKind::kDistractor,
                               UtteranceKind::kClaim, UtteranceKind::kResolution},
                    "utterance kind");
}
QaDimension parse_qa_dimension(std::string_view s) {
  return parse_enum(s,
                    std::array{QaDimension::kFactRetrieval, QaDimension::kLogicReasoning,
                               QaDimension::kSourceAnalysis,
                               QaDimension::kAdversarialDistraction},
                    "QA dimension");
}

std::string VisualDescriptor::render() const {
  std::string out = "[image] scene: ";
  for (std::size_t i = 0; i < scene_tags.size(); ++i) {
    if (i) out += ", ";
    out += scene_tags[i];
  }
  std::string clarity(to_string(ambiguity));
  std::transform(clarity.begin(), clarity.end(), clarity.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out += "; clarity: " + clarity;
  if (image_path) out += "; file: " + *image_path;
  return out;
}

namespace {

struct AttributeTemplate {
  const char* name;
  const char* statement;  // {e} entity, {v} value
  std::vector<const char*> values;
};

// Values are single tokens that occur nowhere else in the templates, so a
// mention of a value is unambiguous.
const std::vector<AttributeTemplate>& attribute_pool() {
  static const std::vector<AttributeTemplate> pool = {
      {"door color", "{e} has a {v} front door",
       {"red", "blue", "green", "yellow", "purple", "orange", "white", "teal"}},
      {"opening day", "{e} opens on {v}",
       {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"}},
      {"signature dish", "{e} is famous for its {v}",
       {"lasagna", "ramen", "tacos", "curry", "paella", "dumplings", "risotto"}},
      {"mascot", "the mascot of {e} is a {v}",
       {"otter", "falcon", "badger", "heron", "fox", "lynx", "beaver"}},
  };
  return pool;
}

const std::vector<const char*> kEntityPrefixes = {"Maple",   "Harbor", "Cedar",  "Willow",
                                                  "Granite", "Juniper", "Summit", "Lantern",
                                                  "Birch",   "Meadow"};
const std::vector<const char*> kEntityKinds = {"cafe",   "bakery", "bookstore", "gallery",
                                               "gym",    "library", "garage",   "studio",
                                               "pharmacy", "florist"};

const std::vector<const char*> kEvents = {
    "the street fair",     "the jazz concert", "the charity run",  "the book sale",
    "the river cleanup",   "the food festival", "the chess tournament", "the art walk",
    "the film night",      "the flea market",  "the science fair", "the boat parade",
    "the poetry slam",     "the bike race",    "the garden tour",  "the trivia night"};

const std::vector<const char*> kPredictionTemplates = {
    "I'm sure {x} will go ahead this weekend.",
    "Mark my words, {x} is happening soon.",
    "Heads up, {x} is definitely on for next week.",
    "I have it on good authority that {x} will take place.",
};

const std::vector<const char*> kChitChat = {
    "The weather has been lovely lately.",
    "Did anyone catch the game last night?",
    "I finally finished that novel I was reading.",
    "My neighbor adopted a kitten this week.",
    "Traffic was terrible on the way home.",
    "I am thinking about learning to play guitar.",
    "Work has been busy, but things are calming down.",
    "We should plan a picnic sometime soon.",
    "I tried a new recipe yesterday and it went well.",
    "The new phone update drained my battery.",
    "I started jogging in the mornings again.",
    "Has anyone seen a good movie recently?",
};

const std::vector<const char*> kDistractorTemplates = {
    "Random thought: {x}.",
    "Did you know that {x}?",
    "Someone told me {x}.",
    "Apparently {x}, according to a friend.",
    "Not that it matters, but {x}.",
    "I walked by earlier and {x}.",
};

std::string replace_all(std::string s, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
  return s;
}

std::string fill(const char* tmpl, const std::string& x) { return replace_all(tmpl, "{x}", x); }

// Portable draws: the engine's output sequence is fixed by the standard, the
// distribution classes are not.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

const AttributeTemplate& attribute_by_name(const std::string& name) {
  for (const auto& a : attribute_pool()) {
    if (name == a.name) return a;
  }
  throw std::invalid_argument("unknown attribute: " + name);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool mentions(const std::string& text, const std::string& phrase) {
  return lower(text).find(lower(phrase)) != std::string::npos;
}

}  // namespace

std::string FactSpec::statement(const std::string& entity, const std::string& value) const {
  const auto& attr = attribute_by_name(attribute);
  return replace_all(replace_all(attr.statement, "{e}", entity), "{v}", value);
}

std::optional<std::string> FactSpec::extract_value(const std::string& entity,
                                                   std::string_view text) const {
  const std::string pattern = lower(statement(entity, "{v}"));
  const auto slot = pattern.find("{v}");
  const std::string prefix = pattern.substr(0, slot);
  const std::string suffix = pattern.substr(slot + 3);
  const std::string hay = lower(std::string(text));
  for (auto pos = hay.find(prefix); pos != std::string::npos; pos = hay.find(prefix, pos + 1)) {
    if (pos > 0 && std::isalnum(static_cast<unsigned char>(hay[pos - 1]))) continue;
    const auto start = pos + prefix.size();
    auto end = start;
    while (end < hay.size() && std::isalnum(static_cast<unsigned char>(hay[end]))) ++end;
    if (end == start) continue;
    if (hay.compare(end, suffix.size(), suffix) != 0) continue;
    return hay.substr(start, end - start);
  }
  return std::nullopt;
}

std::string FactSpec::question() const {
  return "Is it true that " + statement(subject, value_b) + "?";
}

Phase phase_of_session(int index) {
  if (index <= 4) return Phase::kCalibration;
  if (index <= 7) return Phase::kNoise;
  if (index == 8) return Phase::kTrap;
  return Phase::kResolution;
}

double session_timestamp(const BenchConfig& cfg, int index) {
  const auto day = (static_cast<long long>(cfg.span_days) * (index - 1)) / (kSessionCount - 1);
  return cfg.epoch + static_cast<double>(day) * 86400.0;
}

BenchCase generate_case(std::uint64_t seed, LogicType type, const BenchConfig& cfg) {
  if (!(cfg.reliability_a > cfg.reliability_b)) {
    throw std::invalid_argument("generate_case: USER_A must be more reliable than USER_B");
  }
  if (cfg.reliability_a < 0.0 || cfg.reliability_a > 1.0 || cfg.reliability_b < 0.0 ||
      cfg.reliability_b > 1.0) {
    throw std::invalid_argument("generate_case: reliabilities must lie in [0,1]");
  }
  if (cfg.noise_utterances < 1) throw std::invalid_argument("generate_case: noise_utterances < 1");
  if (cfg.span_days < kSessionCount - 1) {
    throw std::invalid_argument("generate_case: span_days too small for strictly increasing sessions");
  }

  Draw draw(seed);
  BenchCase c;
  c.seed = seed;
  c.logic_type = type;
  c.case_id = std::string(1, type_letter(type)) + "-" + std::to_string(seed);

  // Target fact and near-duplicate distractors.
  const auto& attr = draw.pick(attribute_pool());
  auto values = attr.values;
  draw.shuffle(values);
  auto& fact = c.target;
  const std::string prefix = draw.pick(kEntityPrefixes);
  const std::string kind = draw.pick(kEntityKinds);
  fact.subject = prefix + " " + kind;
  fact.attribute = attr.name;
  fact.value_a = values[0];
  fact.value_b = values[1];
  {
    std::vector<std::string> others_prefix;
    std::vector<std::string> others_kind;
    for (const char* p : kEntityPrefixes) {
      if (prefix != p) others_prefix.emplace_back(p);
    }
    for (const char* k : kEntityKinds) {
      if (kind != k) others_kind.emplace_back(k);
    }
    draw.shuffle(others_prefix);
    draw.shuffle(others_kind);
    fact.distractors = {prefix + " " + others_kind[0], others_prefix[0] + " " + kind,
                        prefix + " " + others_kind[1]};
    for (std::size_t i = 0; i < fact.distractors.size(); ++i) {
      fact.distractor_values.push_back(values[2 + i % (values.size() - 2)]);
    }
  }

  switch (type) {
    case LogicType::kStandard:
      c.ground_truth = Verdict::kFalse;
      c.signal_vision = Verdict::kFalse;
      break;
    case LogicType::kInversion:
      c.ground_truth = Verdict::kTrue;
      c.signal_vision = Verdict::kTrue;
      break;
    case LogicType::kAmbiguity:
    case LogicType::kUnknowable:
      c.ground_truth = Verdict::kUnknown;
      c.signal_vision = Verdict::kUnknown;
      break;
  }
  c.signal_text = Verdict::kFalse;  // the historically reliable speaker denies value_b

  // Calibration outcomes: exact counts from the reliabilities, shuffled order.
  const int n_cal = cfg.calibration_sessions;
  int true_a = static_cast<int>(std::lround(cfg.reliability_a * n_cal));
  int true_b = static_cast<int>(std::lround(cfg.reliability_b * n_cal));
  if (true_a <= true_b) {
    if (true_b == n_cal) --true_b;
    true_a = true_b + 1;
  }
  auto outcomes = [&draw, n_cal](int n_true) {
    std::vector<bool> v(static_cast<std::size_t>(n_cal), false);
    for (int i = 0; i < n_true; ++i) v[static_cast<std::size_t>(i)] = true;
    draw.shuffle(v);
    return v;
  };
  const auto outcomes_a = outcomes(true_a);
  const auto outcomes_b = outcomes(true_b);

  std::vector<std::string> events(kEvents.begin(), kEvents.end());
  draw.shuffle(events);
  std::vector<std::string> chit(kChitChat.begin(), kChitChat.end());
  draw.shuffle(chit);
  std::size_t chit_next = 0;
  auto next_chit = [&]() -> std::string { return chit[chit_next++ % chit.size()]; };

  auto say = [](Speaker s, std::string text, UtteranceKind kind, std::string topic = {}) {
    Utterance u;
    u.speaker = s;
    u.text = std::move(text);
    u.kind = kind;
    u.topic = std::move(topic);
    return u;
  };

  for (int idx = 1; idx <= kSessionCount; ++idx) {
    Session s;
    s.index = idx;
    s.timestamp = session_timestamp(cfg, idx);
    s.phase = phase_of_session(idx);
    auto& u = s.utterances;
    switch (s.phase) {
      case Phase::kCalibration: {
        const auto k = static_cast<std::size_t>(idx - 1);
        const std::string& ev_a = events[2 * k];
        const std::string& ev_b = events[2 * k + 1];
        u.push_back(say(Speaker::kUserA, next_chit(), UtteranceKind::kChitChat));
        auto pa = say(Speaker::kUserA, fill(draw.pick(kPredictionTemplates), ev_a),
                      UtteranceKind::kPrediction, ev_a);
        pa.verifiable_outcome = outcomes_a[k];
        u.push_back(std::move(pa));
        auto pb = say(Speaker::kUserB, fill(draw.pick(kPredictionTemplates), ev_b),
                      UtteranceKind::kPrediction, ev_b);
        pb.verifiable_outcome = outcomes_b[k];
        u.push_back(std::move(pb));
        auto outcome_text = [](const std::string& ev, bool happened) {
          return "Update: " + ev + (happened ? " did take place." : " was called off.");
        };
        u.push_back(say(Speaker::kSystem, outcome_text(ev_a, outcomes_a[k]),
                        UtteranceKind::kOutcome, ev_a));
        u.push_back(say(Speaker::kSystem, outcome_text(ev_b, outcomes_b[k]),
                        UtteranceKind::kOutcome, ev_b));
        break;
      }
      case Phase::kNoise: {
        // Spread the distractor volume over the three noise sessions.
        const int slot = idx - 5;
        const int n = cfg.noise_utterances / 3 + (slot < cfg.noise_utterances % 3 ? 1 : 0);
        u.push_back(say(Speaker::kUserB, next_chit(), UtteranceKind::kChitChat));
        for (int i = 0; i < n; ++i) {
          const auto d = draw.index(fact.distractors.size());
          const auto& entity = fact.distractors[d];
          const auto stmt = fact.statement(entity, fact.distractor_values[d]);
          const Speaker who = (i % 2 == 0) ? Speaker::kUserA : Speaker::kUserB;
          u.push_back(say(who, fill(draw.pick(kDistractorTemplates), stmt),
                          UtteranceKind::kDistractor, entity));
        }
        break;
      }
      case Phase::kTrap: {
        u.push_back(say(Speaker::kUserA, next_chit(), UtteranceKind::kChitChat));
        auto claim_a = say(Speaker::kUserA,
                           "I am certain that " + fact.statement(fact.subject, fact.value_a) + ".",
                           UtteranceKind::kClaim, fact.subject);
        auto claim_b = say(Speaker::kUserB,
                           "That's wrong, " + fact.statement(fact.subject, fact.value_b) +
                               ". I took a photo.",
                           UtteranceKind::kClaim, fact.subject);
        EvidenceRecord ev;
        std::vector<std::string> subject_tags = tokenize(fact.subject);
        switch (type) {
          case LogicType::kStandard:
          case LogicType::kInversion: {
            const bool for_a = type == LogicType::kStandard;
            const auto& v = for_a ? fact.value_a : fact.value_b;
            ev.caption = "Photo caption: a clear close-up showing that " +
                         fact.statement(fact.subject, v) + ".";
            ev.visual.scene_tags = subject_tags;
            for (const auto& t : tokenize(fact.attribute)) ev.visual.scene_tags.push_back(t);
            ev.visual.scene_tags.push_back(v);
            ev.visual.scene_tags.push_back("close-up");
            ev.visual.scene_tags.push_back("daylight");
            ev.visual.ambiguity = Ambiguity::kClear;
            ev.supports = for_a ? Supports::kUserAClaim : Supports::kUserBClaim;
            if (for_a) {
              claim_a.text = "I am certain that " + fact.statement(fact.subject, fact.value_a) +
                             ". I took a photo.";
              claim_b.text = "That's wrong, " + fact.statement(fact.subject, fact.value_b) + ".";
            }
            break;
          }
          case LogicType::kAmbiguity:
            ev.caption = "Photo caption: a blurry shot of " + fact.subject + "; its " +
                         fact.attribute + " cannot be made out.";
            ev.visual.scene_tags = subject_tags;
            ev.visual.scene_tags.push_back("blurry");
            ev.visual.scene_tags.push_back("low-light");
            ev.visual.scene_tags.push_back("possibly-" + fact.value_b);
            ev.visual.ambiguity = Ambiguity::kVague;
            ev.supports = Supports::kNeither;
            break;
          case LogicType::kUnknowable:
            ev.caption = "Photo caption: a street near " + fact.subject +
                         " that shows nothing about its " + fact.attribute + ".";
            ev.visual.scene_tags = {"street", "crowd", "parked-cars", "daylight"};
            for (const auto& t : subject_tags) ev.visual.scene_tags.push_back(t);
            ev.visual.ambiguity = Ambiguity::kNone;
            ev.supports = Supports::kNeither;
            break;
        }
        if (type == LogicType::kStandard) {
          claim_a.evidence = std::move(ev);
        } else {
          claim_b.evidence = std::move(ev);
        }
        u.push_back(std::move(claim_a));
        u.push_back(std::move(claim_b));
        break;
      }
      case Phase::kResolution: {
        if (idx == 9) {
          std::string note = "Follow-up on the " + fact.attribute + " of " + fact.subject + ": ";
          switch (type) {
            case LogicType::kStandard:
            case LogicType::kInversion:
              note += "the photo from that discussion was checked and it is genuine.";
              break;
            case LogicType::kAmbiguity:
              note += "the photo was too blurry to settle anything.";
              break;
            case LogicType::kUnknowable:
              note += "nobody ever found a record of it.";
              break;
          }
          u.push_back(say(Speaker::kSystem, std::move(note), UtteranceKind::kResolution,
                          fact.subject));
        }
        u.push_back(say(Speaker::kUserA, next_chit(), UtteranceKind::kChitChat));
        u.push_back(say(Speaker::kUserB, next_chit(), UtteranceKind::kChitChat));
        break;
      }
    }
    c.sessions.push_back(std::move(s));
  }
  return c;
}

int SuiteCounts::of(LogicType t) const {
  switch (t) {
    case LogicType::kStandard:
      return standard;
    case LogicType::kInversion:
      return inversion;
    case LogicType::kAmbiguity:
      return ambiguity;
    case LogicType::kUnknowable:
      return unknowable;
  }
  return 0;
}

SuiteCounts SuiteCounts::parse(std::string_view text) {
  SuiteCounts c;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto part = text.substr(pos, end - pos);
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("type counts: expected TYPE:COUNT, got '" + std::string(part) + "'");
    }
    const auto type = parse_logic_type(part.substr(0, colon));
    const std::string num(part.substr(colon + 1));
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw std::invalid_argument("type counts: bad count '" + num + "'");
    }
    if (n < 0) throw std::invalid_argument("type counts must be >= 0");
    switch (type) {
      case LogicType::kStandard:
        c.standard = n;
        break;
      case LogicType::kInversion:
        c.inversion = n;
        break;
      case LogicType::kAmbiguity:
        c.ambiguity = n;
        break;
      case LogicType::kUnknowable:
        c.unknowable = n;
        break;
    }
    pos = end + 1;
  }
  return c;
}

std::uint64_t derive_case_seed(std::uint64_t suite_seed, LogicType type, int ordinal) {
  return fnv1a64(std::to_string(suite_seed) + ":" + type_letter(type) + ":" +
                 std::to_string(ordinal));
}

std::vector<BenchCase> generate_suite(std::uint64_t suite_seed, const SuiteCounts& counts,
                                      const BenchConfig& cfg) {
  std::vector<BenchCase> suite;
  suite.reserve(static_cast<std::size_t>(std::max(0, counts.total())));
  for (auto type : {LogicType::kStandard, LogicType::kInversion, LogicType::kAmbiguity,
                    LogicType::kUnknowable}) {
    const int n = counts.of(type);
    if (n < 0) throw std::invalid_argument("generate_suite: negative count");
    for (int i = 0; i < n; ++i) {
      auto c = generate_case(derive_case_seed(suite_seed, type, i), type, cfg);
      c.case_id = "s" + std::to_string(suite_seed) + "-" + type_letter(type) + "-" +
                  (i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i);
      suite.push_back(std::move(c));
    }
  }
  return suite;
}

std::vector<std::string> validate_case(const BenchCase& c, int min_noise_utterances) {
  std::vector<std::string> v;
  if (c.sessions.size() != kSessionCount) {
    v.push_back("session count: expected 10, got " + std::to_string(c.sessions.size()));
  }
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const auto& s = c.sessions[i];
    const int expect = static_cast<int>(i) + 1;
    if (s.index != expect) {
      v.push_back("session index: position " + std::to_string(expect) + " holds index " +
                  std::to_string(s.index));
    }
    if (s.phase != phase_of_session(expect)) {
      v.push_back("phase: session " + std::to_string(expect) + " is " +
                  std::string(to_string(s.phase)));
    }
    if (i > 0 && !(s.timestamp > c.sessions[i - 1].timestamp)) {
      v.push_back("timestamps: session " + std::to_string(expect) + " not after session " +
                  std::to_string(expect - 1));
    }
  }
  if (c.sessions.size() >= 2) {
    const double days = (c.sessions.back().timestamp - c.sessions.front().timestamp) / 86400.0;
    if (days < 150.0 || days > 210.0) {
      v.push_back("timestamps: span of " + std::to_string(days) + " days is not about 6 months");
    }
  }

  const bool deterministic = is_deterministic(c.logic_type);
  if (deterministic && c.ground_truth == Verdict::kUnknown) {
    v.push_back("ground truth: Type A/B must be TRUE or FALSE");
  }
  if (!deterministic && c.ground_truth != Verdict::kUnknown) {
    v.push_back("ground truth: Type C/D must be UNKNOWN");
  }
  if (c.logic_type == LogicType::kStandard && c.ground_truth == Verdict::kTrue) {
    v.push_back("ground truth: Type A sides with USER_A, so must be FALSE");
  }
  if (c.logic_type == LogicType::kInversion && c.ground_truth == Verdict::kFalse) {
    v.push_back("ground truth: Type B sides with the evidence, so must be TRUE");
  }

  const auto& f = c.target;
  if (f.value_a == f.value_b) v.push_back("fact: speakers claim the same value");
  if (f.distractors.empty()) v.push_back("fact: no distractor entities");
  if (f.distractors.size() != f.distractor_values.size()) {
    v.push_back("fact: distractor values do not match distractor entities");
  }
  const auto subject_tokens = tokenize(f.subject);
  for (const auto& d : f.distractors) {
    const auto dt = tokenize(d);
    const bool shares = std::any_of(dt.begin(), dt.end(), [&](const std::string& t) {
      return std::find(subject_tokens.begin(), subject_tokens.end(), t) != subject_tokens.end();
    });
    if (!shares) v.push_back("distractor: '" + d + "' shares no token with the subject");
  }

  int cal_a = 0;
  int cal_b = 0;
  int true_a = 0;
  int true_b = 0;
  int noise = 0;
  int evidence_count = 0;
  int evidence_outside_trap = 0;
  for (const auto& s : c.sessions) {
    for (const auto& u : s.utterances) {
      if (u.kind == UtteranceKind::kPrediction && u.verifiable_outcome) {
        if (u.speaker == Speaker::kUserA) {
          ++cal_a;
          true_a += *u.verifiable_outcome ? 1 : 0;
        } else if (u.speaker == Speaker::kUserB) {
          ++cal_b;
          true_b += *u.verifiable_outcome ? 1 : 0;
        }
      }
      if (u.kind == UtteranceKind::kDistractor && s.phase == Phase::kNoise) ++noise;
      if (s.phase == Phase::kTrap) {
        for (const auto& d : f.distractors) {
          if (mentions(u.text, d)) v.push_back("distractor: '" + d + "' appears in the trap session");
        }
      }
      if (u.evidence) {
        ++evidence_count;
        if (s.phase != Phase::kTrap) ++evidence_outside_trap;
        const auto& ev = *u.evidence;
        switch (c.logic_type) {
          case LogicType::kStandard:
            if (ev.supports != Supports::kUserAClaim || ev.visual.ambiguity != Ambiguity::kClear) {
              v.push_back("evidence: Type A evidence must clearly support USER_A");
            }
            break;
          case LogicType::kInversion:
            if (ev.supports != Supports::kUserBClaim || ev.visual.ambiguity != Ambiguity::kClear) {
              v.push_back("evidence: Type B evidence must clearly support USER_B");
            }
            break;
          case LogicType::kAmbiguity:
            if (ev.visual.ambiguity != Ambiguity::kVague) {
              v.push_back("ambiguity: Type C evidence must be VAGUE");
            }
            break;
          case LogicType::kUnknowable:
            if (ev.supports != Supports::kNeither) {
              v.push_back("evidence: Type D evidence must support NEITHER");
            }
            break;
        }
      }
    }
  }
  if (cal_a == 0 || cal_b == 0) {
    v.push_back("calibration: both users need verifiable events");
  } else if (!(static_cast<double>(true_a) / cal_a > static_cast<double>(true_b) / cal_b)) {
    v.push_back("calibration: USER_A is not more reliable than USER_B");
  }
  if (noise < min_noise_utterances) {
    v.push_back("noise: " + std::to_string(noise) + " distractor utterances, need " +
                std::to_string(min_noise_utterances));
  }
  if (evidence_outside_trap > 0) v.push_back("evidence: evidence outside the trap session");
  if (evidence_count == 0) v.push_back("evidence: trap session carries no evidence");

  // Exactly one USER_A vs USER_B contradiction about the target, in session 8.
  int claims_a = 0;
  int claims_b = 0;
  int claims_elsewhere = 0;
  for (const auto& s : c.sessions) {
    for (const auto& u : s.utterances) {
      if (u.kind != UtteranceKind::kClaim) continue;
      if (s.phase != Phase::kTrap) {
        ++claims_elsewhere;
        continue;
      }
      if (u.speaker == Speaker::kUserA && mentions(u.text, f.value_a)) ++claims_a;
      if (u.speaker == Speaker::kUserB && mentions(u.text, f.value_b)) ++claims_b;
    }
  }
  if (claims_a != 1 || claims_b != 1 || claims_elsewhere != 0) {
    v.push_back("contradiction: expected exactly one USER_A/USER_B claim pair in session 8");
  }
  if (c.logic_type == LogicType::kInversion && c.sessions.size() >= 8) {
    bool trap_backs_b = false;
    for (const auto& u : c.sessions[7].utterances) {
      if (u.speaker == Speaker::kUserB && u.kind == UtteranceKind::kClaim && u.evidence &&
          u.evidence->supports == Supports::kUserBClaim) {
        trap_backs_b = true;
      }
    }
    if (!trap_backs_b) v.push_back("trap: session 8 lacks evidence backing USER_B");
  }
  return v;
}

std::vector<QaItem> layer1_questions(const BenchCase& c) {
  std::vector<QaItem> qs;
  auto add = [&](QaDimension d, std::string q, std::string gold, std::string topic) {
    QaItem item;
    item.question_id = c.case_id + "-q" + std::to_string(qs.size() + 1);
    item.case_id = c.case_id;
    item.dimension = d;
    item.question = std::move(q);
    item.gold = std::move(gold);
    item.topic = std::move(topic);
    qs.push_back(std::move(item));
  };

  const Utterance* first_a = nullptr;
  const Utterance* first_b = nullptr;
  int true_a = 0;
  int true_b = 0;
  for (const auto& s : c.sessions) {
    for (const auto& u : s.utterances) {
      if (u.kind != UtteranceKind::kPrediction || !u.verifiable_outcome) continue;
      if (u.speaker == Speaker::kUserA) {
        if (!first_a) first_a = &u;
        true_a += *u.verifiable_outcome ? 1 : 0;
      } else if (u.speaker == Speaker::kUserB) {
        if (!first_b) first_b = &u;
        true_b += *u.verifiable_outcome ? 1 : 0;
      }
    }
  }
  for (const auto* u : {first_a, first_b}) {
    if (!u) continue;
    add(QaDimension::kFactRetrieval, "Did " + u->topic + " take place?",
        *u->verifiable_outcome ? "yes" : "no", u->topic);
  }
  add(QaDimension::kLogicReasoning, "How many of User A's predictions came true?",
      std::to_string(true_a), "USER_A");
  add(QaDimension::kLogicReasoning, "How many of User B's predictions came true?",
      std::to_string(true_b), "USER_B");
  add(QaDimension::kSourceAnalysis, "Who has been more reliable, User A or User B?",
      true_a >= true_b ? "USER_A" : "USER_B", "");
  const auto& f = c.target;
  for (std::size_t i = 0; i < f.distractors.size(); ++i) {
    add(QaDimension::kAdversarialDistraction,
        "What is the " + f.attribute + " of " + f.distractors[i] + "?", f.distractor_values[i],
        f.distractors[i]);
  }
  return qs;
}

std::string normalize_answer(std::string_view s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  while (!out.empty() && std::ispunct(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

}  // namespace mma
