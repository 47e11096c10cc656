#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mma/types.hpp"

namespace mma {

enum class Speaker { kUserA, kUserB, kSystem };
enum class Phase { kCalibration, kNoise, kTrap, kResolution };
enum class Ambiguity { kClear, kVague, kNone };
enum class Supports { kUserAClaim, kUserBClaim, kNeither };

// Generator bookkeeping for each utterance, used by validation and Layer-1
// question generation.
enum class UtteranceKind {
  kChitChat,
  kPrediction,  // calibration: a checkable forecast
  kOutcome,     // calibration: the system announces what happened
  kDistractor,  // noise: a statement about a near-duplicate entity
  kClaim,       // trap: a claim about the target fact
  kResolution,  // closing note on the target fact
};

std::string_view to_string(Speaker s);
std::string_view to_string(Phase p);
std::string_view to_string(Ambiguity a);
std::string_view to_string(Supports s);
std::string_view to_string(UtteranceKind k);
Speaker parse_speaker(std::string_view s);
Phase parse_phase(std::string_view s);
Ambiguity parse_ambiguity(std::string_view s);
Supports parse_supports(std::string_view s);
UtteranceKind parse_utterance_kind(std::string_view s);

// Stand-in for a raw image: what a vision model would see.
struct VisualDescriptor {
  std::vector<std::string> scene_tags;
  Ambiguity ambiguity = Ambiguity::kNone;
  std::optional<std::string> image_path;  // attach a real image file here

  std::string render() const;
};

struct EvidenceRecord {
  std::string caption;  // TEXT-mode oracle caption
  VisualDescriptor visual;
  Supports supports = Supports::kNeither;

  std::string render(Mode mode) const { return mode == Mode::kText ? caption : visual.render(); }
};

struct Utterance {
  Speaker speaker = Speaker::kSystem;
  std::string text;
  UtteranceKind kind = UtteranceKind::kChitChat;
  std::string topic;  // event name, distractor entity, or target subject
  std::optional<EvidenceRecord> evidence;
  std::optional<bool> verifiable_outcome;  // predictions: did it come true
};

struct Session {
  int index = 0;  // 1..10
  double timestamp = 0.0;
  Phase phase = Phase::kCalibration;
  std::vector<Utterance> utterances;
};

struct FactSpec {
  std::string subject;
  std::string attribute;
  std::string value_a;  // USER_A's claim
  std::string value_b;  // USER_B's claim; the probed proposition is "value_b holds"
  std::vector<std::string> distractors;
  std::vector<std::string> distractor_values;  // parallel to distractors

  // "<subject> has <attribute> <value>" rendered through the attribute template.
  std::string statement(const std::string& entity, const std::string& value) const;
  std::string question() const;
  // Reads the value this fact's attribute template assigns to entity in text,
  // or nullopt if the text does not contain such a statement.
  std::optional<std::string> extract_value(const std::string& entity, std::string_view text) const;
};

struct BenchCase {
  std::string case_id;
  LogicType logic_type = LogicType::kStandard;
  std::uint64_t seed = 0;
  std::vector<Session> sessions;
  FactSpec target;
  Verdict ground_truth = Verdict::kUnknown;
  // Theoretical modality signals for MSA: what the reliable text source and
  // the visual evidence each imply about the proposition.
  Verdict signal_text = Verdict::kFalse;
  Verdict signal_vision = Verdict::kUnknown;
};

struct BenchConfig {
  double reliability_a = 0.9;
  double reliability_b = 0.3;
  int noise_utterances = 20;
  double epoch = 1704067200.0;  // 2024-01-01T00:00:00Z
  int span_days = 180;
  int calibration_sessions = 4;  // fixed by the phase layout
};

inline constexpr int kSessionCount = 10;

Phase phase_of_session(int index);
double session_timestamp(const BenchConfig& cfg, int index);

BenchCase generate_case(std::uint64_t seed, LogicType type, const BenchConfig& cfg = {});

struct SuiteCounts {
  int standard = 0;
  int inversion = 0;
  int ambiguity = 0;
  int unknowable = 0;

  int total() const { return standard + inversion + ambiguity + unknowable; }
  int of(LogicType t) const;
  // "A:1,B:17,C:0,D:0"; omitted types count 0.
  static SuiteCounts parse(std::string_view text);
};

// Case seed for the n-th case of a type: fnv1a64("<suite_seed>:<letter>:<n>").
std::uint64_t derive_case_seed(std::uint64_t suite_seed, LogicType type, int ordinal);

// Cases ordered by type (A, B, C, D), then ordinal.
std::vector<BenchCase> generate_suite(std::uint64_t suite_seed, const SuiteCounts& counts,
                                      const BenchConfig& cfg = {});

std::vector<std::string> validate_case(const BenchCase& c, int min_noise_utterances = 20);

enum class QaDimension { kFactRetrieval, kLogicReasoning, kSourceAnalysis, kAdversarialDistraction };
std::string_view to_string(QaDimension d);
QaDimension parse_qa_dimension(std::string_view s);

struct QaItem {
  std::string question_id;
  std::string case_id;
  QaDimension dimension = QaDimension::kFactRetrieval;
  std::string question;
  std::string gold;
  std::string topic;  // event or entity the question is about
};

std::vector<QaItem> layer1_questions(const BenchCase& c);

// Lowercase, trim, collapse internal whitespace, drop trailing punctuation.
std::string normalize_answer(std::string_view s);

}  // namespace mma
