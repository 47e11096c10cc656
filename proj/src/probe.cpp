#include "mma/probe.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mma {

std::string_view to_string(WagerOption o) {
  switch (o) {
    case WagerOption::kTrue:
      return "TRUE";
    case WagerOption::kFalse:
      return "FALSE";
    case WagerOption::kUnknown:
      return "UNKNOWN";
    case WagerOption::kReserve:
      return "RESERVE";
  }
  return "RESERVE";
}

WagerOption parse_wager_option(std::string_view s) {
  if (s == "TRUE") return WagerOption::kTrue;
  if (s == "FALSE") return WagerOption::kFalse;
  if (s == "UNKNOWN") return WagerOption::kUnknown;
  if (s == "RESERVE") return WagerOption::kReserve;
  throw std::invalid_argument("unknown wager option: " + std::string(s));
}

WagerOption wager_option_for(Verdict v) {
  switch (v) {
    case Verdict::kTrue:
      return WagerOption::kTrue;
    case Verdict::kFalse:
      return WagerOption::kFalse;
    case Verdict::kUnknown:
      return WagerOption::kUnknown;
  }
  return WagerOption::kUnknown;
}

bool Wagers::valid() const {
  for (int p : points) {
    if (p < 0) return false;
  }
  return sum() == 100;
}

void validate_transcript(const ProbeTranscript& t) {
  for (int p : t.step2_wagers.points) {
    if (p < 0) throw std::invalid_argument("wager points must be nonnegative");
  }
  if (t.step2_wagers.sum() != 100) {
    throw std::invalid_argument("wager points sum to " + std::to_string(t.step2_wagers.sum()) +
                                ", expected 100");
  }
}

void CoreParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0,1]");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
}

double core_score(const ProbeTranscript& t, Verdict gold, LogicType type, const CoreParams& p) {
  validate_transcript(t);
  p.validate();
  const auto& w = t.step2_wagers;
  const Verdict final_verdict = t.step3_verdict;
  if (is_deterministic(type)) {
    const double hit = final_verdict == gold ? 1.0 : 0.0;
    return p.beta * hit + (1.0 - p.beta) * w.on(gold) / 100.0;
  }
  const double committed = final_verdict != Verdict::kUnknown ? 1.0 : 0.0;
  return w.reserve() / 100.0 - p.gamma * committed;
}

std::string_view to_string(MsaClass c) {
  switch (c) {
    case MsaClass::kTextDominant:
      return "TEXT_DOMINANT";
    case MsaClass::kVisionDominant:
      return "VISION_DOMINANT";
    case MsaClass::kConfusion:
      return "CONFUSION";
  }
  return "CONFUSION";
}

MsaClass msa_classify(Verdict model, Verdict signal_text, Verdict signal_vision) {
  if (model == signal_text) return MsaClass::kTextDominant;
  if (model == signal_vision) return MsaClass::kVisionDominant;
  return MsaClass::kConfusion;
}

RelativeUncertainty relative_uncertainty(double h_text, double h_vision) {
  if (!(h_text >= 0.0) || !(h_vision >= 0.0)) {
    throw std::invalid_argument("relative_uncertainty: entropies must be nonnegative");
  }
  const double total = h_text + h_vision;
  if (total == 0.0) return {0.0, true};
  return {2.0 * (h_text - h_vision) / total, false};
}

double entropy_of_wagers(const Wagers& w) {
  if (!w.valid()) {
    throw std::invalid_argument("entropy_of_wagers: wagers must be nonnegative and sum to 100");
  }
  double h = 0.0;
  for (int p : w.points) {
    if (p == 0) continue;
    const double q = p / 100.0;
    h -= q * std::log(q);
  }
  return h;
}

namespace {

void check_aligned(std::span<const ProbeTranscript> t, std::span<const Verdict> g) {
  if (t.size() != g.size()) {
    throw std::invalid_argument("transcripts and gold verdicts differ in length (" +
                                std::to_string(t.size()) + " vs " + std::to_string(g.size()) + ")");
  }
}

}  // namespace

std::optional<double> scr(std::span<const ProbeTranscript> transcripts,
                          std::span<const Verdict> golds) {
  check_aligned(transcripts, golds);
  int wrong = 0;
  int fixed = 0;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (transcripts[i].step1_verdict == golds[i]) continue;
    ++wrong;
    if (transcripts[i].step3_verdict == golds[i]) ++fixed;
  }
  if (wrong == 0) return std::nullopt;
  return static_cast<double>(fixed) / wrong;
}

std::optional<double> fcr(std::span<const ProbeTranscript> transcripts,
                          std::span<const Verdict> golds) {
  check_aligned(transcripts, golds);
  int right = 0;
  int flipped = 0;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    if (transcripts[i].step1_verdict != golds[i]) continue;
    ++right;
    if (transcripts[i].step3_verdict != golds[i]) ++flipped;
  }
  if (right == 0) return std::nullopt;
  return static_cast<double>(flipped) / right;
}

int logic_collapse_count(std::span<const ProbeTranscript> transcripts,
                         std::span<const Verdict> golds) {
  check_aligned(transcripts, golds);
  int n = 0;
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    const auto& t = transcripts[i];
    if (t.confessed_error && t.step3_verdict == t.step1_verdict && t.step3_verdict != golds[i]) {
      ++n;
    }
  }
  return n;
}

ScoredCase score_case(const ProbeTranscript& t, const CaseTruth& truth, const CoreParams& p) {
  ScoredCase s;
  s.transcript = t;
  s.truth = truth;
  s.core = core_score(t, truth.gold, truth.logic_type, p);
  s.msa = msa_classify(t.step3_verdict, truth.signal_text, truth.signal_vision);
  s.wager_entropy = entropy_of_wagers(t.step2_wagers);
  return s;
}

namespace {

std::optional<double> ratio(double num, int den) {
  if (den == 0) return std::nullopt;
  return num / den;
}

}  // namespace

std::optional<double> TypeBreakdown::verdict_accuracy() const { return ratio(verdict_correct, n); }
std::optional<double> TypeBreakdown::mean_core() const { return ratio(core_sum, n); }
std::optional<double> ModeReport::verdict_accuracy() const { return ratio(verdict_correct, n); }
std::optional<double> ModeReport::mean_core() const { return ratio(core_sum, n); }
std::optional<double> ModeReport::mean_entropy() const { return ratio(entropy_sum, n); }

int ProbeReport::total_cases() const {
  int n = 0;
  for (const auto& m : modes) n += m.n;
  return n;
}

ProbeReport aggregate_report(std::span<const ScoredCase> cases, const CoreParams& params,
                             VerdictStep step, const std::map<Mode, double>& core_accuracy) {
  ProbeReport report;
  report.params = params;
  report.verdict_step = step;
  for (Mode mode : {Mode::kText, Mode::kVision}) {
    std::vector<ProbeTranscript> ts;
    std::vector<Verdict> golds;
    ModeReport m;
    m.mode = mode;
    for (const auto& c : cases) {
      if (c.transcript.mode != mode) continue;
      ts.push_back(c.transcript);
      golds.push_back(c.truth.gold);
      const Verdict v =
          step == VerdictStep::kFinal ? c.transcript.step3_verdict : c.transcript.step1_verdict;
      const bool correct = v == c.truth.gold;
      ++m.n;
      m.verdict_correct += correct ? 1 : 0;
      m.core_sum += c.core;
      m.entropy_sum += c.wager_entropy;
      auto& bt = m.by_type[static_cast<std::size_t>(c.truth.logic_type)];
      ++bt.n;
      bt.verdict_correct += correct ? 1 : 0;
      bt.core_sum += c.core;
      ++m.msa_counts[static_cast<std::size_t>(c.msa)];
    }
    if (m.n == 0) continue;
    m.scr = mma::scr(ts, golds);
    m.fcr = mma::fcr(ts, golds);
    m.logic_collapse = logic_collapse_count(ts, golds);
    if (auto it = core_accuracy.find(mode); it != core_accuracy.end()) m.core_accuracy = it->second;
    report.modes.push_back(std::move(m));
  }
  if (report.modes.size() == 2) {
    report.delta_h_rel =
        relative_uncertainty(*report.modes[0].mean_entropy(), *report.modes[1].mean_entropy());
  }
  return report;
}

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *v * 100.0);
  return buf;
}

std::string num(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

}  // namespace

std::string probe_report_csv(const ProbeReport& r, const std::string& method) {
  std::ostringstream out;
  out << "Method,Mode,Core Acc.,Verdict Acc.,CoRe Score,Type B Acc.,Type D Score\n";
  for (const auto& m : r.modes) {
    out << method << ',' << (m.mode == Mode::kText ? "Text" : "Vision") << ','
        << pct(m.core_accuracy) << ',' << pct(m.verdict_accuracy()) << ',' << num(m.mean_core())
        << ',' << pct(m.of(LogicType::kInversion).verdict_accuracy()) << ','
        << num(m.of(LogicType::kUnknowable).mean_core()) << '\n';
  }
  return out.str();
}

}  // namespace mma
