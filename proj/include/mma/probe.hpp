#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mma/types.hpp"

namespace mma {

enum class WagerOption { kTrue = 0, kFalse = 1, kUnknown = 2, kReserve = 3 };

std::string_view to_string(WagerOption o);
WagerOption parse_wager_option(std::string_view s);
WagerOption wager_option_for(Verdict v);

// 100 points split over TRUE / FALSE / UNKNOWN / RESERVE.
struct Wagers {
  std::array<int, 4> points{};

  int& operator[](WagerOption o) { return points[static_cast<std::size_t>(o)]; }
  int operator[](WagerOption o) const { return points[static_cast<std::size_t>(o)]; }
  int sum() const { return points[0] + points[1] + points[2] + points[3]; }
  // Nonnegative and summing to exactly 100.
  bool valid() const;
  int reserve() const { return (*this)[WagerOption::kReserve]; }
  int on(Verdict v) const { return (*this)[wager_option_for(v)]; }

  friend bool operator==(const Wagers&, const Wagers&) = default;
};

struct ProbeTranscript {
  std::string case_id;
  Mode mode = Mode::kText;
  Verdict step1_verdict = Verdict::kUnknown;
  Wagers step2_wagers;
  Verdict step3_verdict = Verdict::kUnknown;
  bool confessed_error = false;
  std::array<std::string, 3> rationales;  // audit only

  friend bool operator==(const ProbeTranscript&, const ProbeTranscript&) = default;
};

// Throws std::invalid_argument naming the first problem.
void validate_transcript(const ProbeTranscript& t);

struct CoreParams {
  double beta = 0.5;
  double gamma = 1.0;

  void validate() const;
};

// Confidence-and-Reserve score. Deterministic types reward a correct final
// verdict and the stake on the gold option; indeterminate types reward the
// reserve and charge gamma for committing to anything but UNKNOWN.
double core_score(const ProbeTranscript& t, Verdict gold, LogicType type, const CoreParams& p);

enum class MsaClass { kTextDominant, kVisionDominant, kConfusion };
std::string_view to_string(MsaClass c);

// Text wins when both signals match the verdict.
MsaClass msa_classify(Verdict model, Verdict signal_text, Verdict signal_vision);

struct RelativeUncertainty {
  double value = 0.0;
  bool degenerate = false;  // both entropies were zero
};

// 2 (H_text - H_vis) / (H_text + H_vis); positive means the visual stream is
// held with more certainty.
RelativeUncertainty relative_uncertainty(double h_text, double h_vision);

// Shannon entropy (nats) of the wager split.
double entropy_of_wagers(const Wagers& w);

// Fraction of step-1 errors fixed at step 3; nullopt when there were none.
std::optional<double> scr(std::span<const ProbeTranscript> transcripts,
                          std::span<const Verdict> golds);
// Fraction of step-1 correct verdicts abandoned at step 3.
std::optional<double> fcr(std::span<const ProbeTranscript> transcripts,
                          std::span<const Verdict> golds);
// Confessed an error yet kept the same wrong verdict.
int logic_collapse_count(std::span<const ProbeTranscript> transcripts,
                         std::span<const Verdict> golds);

struct CaseTruth {
  std::string case_id;
  LogicType logic_type = LogicType::kStandard;
  Verdict gold = Verdict::kUnknown;
  Verdict signal_text = Verdict::kFalse;
  Verdict signal_vision = Verdict::kUnknown;
};

struct ScoredCase {
  ProbeTranscript transcript;
  CaseTruth truth;
  double core = 0.0;
  MsaClass msa = MsaClass::kConfusion;
  double wager_entropy = 0.0;
};

ScoredCase score_case(const ProbeTranscript& t, const CaseTruth& truth, const CoreParams& p);

enum class VerdictStep { kInitial, kFinal };

struct TypeBreakdown {
  int n = 0;
  int verdict_correct = 0;
  double core_sum = 0.0;

  std::optional<double> verdict_accuracy() const;
  std::optional<double> mean_core() const;
};

struct ModeReport {
  Mode mode = Mode::kText;
  int n = 0;
  int verdict_correct = 0;
  double core_sum = 0.0;
  std::array<TypeBreakdown, 4> by_type{};  // indexed by LogicType
  std::array<int, 3> msa_counts{};         // indexed by MsaClass
  std::optional<double> scr;
  std::optional<double> fcr;
  int logic_collapse = 0;
  double entropy_sum = 0.0;
  std::optional<double> core_accuracy;  // Layer-1 QA accuracy, when answers were supplied

  std::optional<double> verdict_accuracy() const;
  std::optional<double> mean_core() const;
  std::optional<double> mean_entropy() const;
  const TypeBreakdown& of(LogicType t) const { return by_type[static_cast<std::size_t>(t)]; }
};

struct ProbeReport {
  CoreParams params;
  VerdictStep verdict_step = VerdictStep::kFinal;
  std::vector<ModeReport> modes;  // one per mode present, TEXT first
  // Present only when both modes were scored.
  std::optional<RelativeUncertainty> delta_h_rel;

  int total_cases() const;
};

ProbeReport aggregate_report(std::span<const ScoredCase> cases, const CoreParams& params,
                             VerdictStep step = VerdictStep::kFinal,
                             const std::map<Mode, double>& core_accuracy = {});

// Method,Mode,Core Acc.,Verdict Acc.,CoRe Score,Type B Acc.,Type D Score
std::string probe_report_csv(const ProbeReport& r, const std::string& method);

}  // namespace mma
