#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mma {

// LABEL_ABSTAIN: abstaining means predicting "not enough info", so an
// abstention on an NEI item is correct (FEVER-style).
// COVERAGE: an abstention is a non-answer, neither right nor wrong
// (LoCoMo-style).
enum class Regime { kLabelAbstain, kCoverage };

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view s);

struct EvalRecord {
  std::string question_id;
  std::string gold;
  std::optional<std::string> prediction;  // nullopt = abstain
  Regime regime = Regime::kLabelAbstain;
  std::optional<double> confidence;
  std::optional<std::string> category;  // externally judged breakdowns, consumed as-is
  std::optional<double> llm_score;
};

// "NEI", "NOT ENOUGH INFO", "UNANSWERABLE" in any case/spacing.
bool is_unanswerable_label(std::string_view label);

bool is_abstain(const EvalRecord& r);
// Answered and matching gold after normalization.
bool answered_correctly(const EvalRecord& r);

// Counts are real-valued so seed-averaged tables can be fed in directly.
struct SelectiveSummary {
  Regime regime = Regime::kLabelAbstain;
  double n = 0.0;
  double answered_correct = 0.0;
  double answered_wrong = 0.0;
  double correct_abstain = 0.0;  // abstained on an unanswerable item
  double wrong_abstain = 0.0;    // abstained on an answerable item

  double answered() const { return answered_correct + answered_wrong; }
  double abstains() const { return correct_abstain + wrong_abstain; }
  double raw_accuracy() const;
  std::optional<double> actionable_accuracy() const;
  double abstain_rate() const;
  std::optional<double> abstain_precision() const;
};

SelectiveSummary summarize(std::span<const EvalRecord> records);

// (answered_correct + correct_abstain + alpha * wrong_abstain) / N.
double selective_score(const SelectiveSummary& s, double alpha);

// answered_correct - lambda * answered_wrong + r * abstains.
double utility(const SelectiveSummary& s, double lambda, double r);

struct RiskCoveragePoint {
  std::optional<double> threshold;  // nullopt for the single operating point
  double coverage = 0.0;
  std::optional<double> risk;  // undefined when nothing is answered
};

// With a confidence on every record: one point per distinct confidence among
// answered records (answer iff confidence >= threshold), ascending threshold.
// Otherwise the single operating point.
std::vector<RiskCoveragePoint> risk_coverage(std::span<const EvalRecord> records);

struct Stability {
  double mean = 0.0;
  double std = 0.0;
};

// Sample (n-1) standard deviation unless population is set.
Stability stability(std::span<const double> values, bool population = false);

// Mean of per-seed summaries, count by count.
SelectiveSummary average_summaries(std::span<const SelectiveSummary> per_seed);

// Method,Raw Acc.,Selective (α=<alpha>),Abstain Rate,Abstain Prec.,Stability (Std)
std::string selective_table_csv(const std::string& method, const SelectiveSummary& s,
                                double alpha, const std::optional<Stability>& stab);

// Method,Single-Hop,Multi-Hop,Open-Domain,Temporal,Accuracy,Wrong Ans.,Act. Acc.,Utility (λ=..., r=...)
std::string coverage_table_csv(const std::string& method, std::span<const EvalRecord> records,
                               const SelectiveSummary& s, double lambda, double r);

// alpha,selective_score
std::string alpha_sweep_csv(const SelectiveSummary& s, std::span<const double> alphas);

// threshold,coverage,risk
std::string risk_coverage_csv(std::span<const RiskCoveragePoint> points);

}  // namespace mma
