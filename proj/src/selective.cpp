#include "mma/selective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mma/bench.hpp"

namespace mma {

std::string_view to_string(Regime r) {
  return r == Regime::kLabelAbstain ? "label_abstain" : "coverage";
}

Regime parse_regime(std::string_view s) {
  if (s == "label_abstain" || s == "label-abstain" || s == "LABEL_ABSTAIN") {
    return Regime::kLabelAbstain;
  }
  if (s == "coverage" || s == "COVERAGE") return Regime::kCoverage;
  throw std::invalid_argument("unknown regime: " + std::string(s));
}

bool is_unanswerable_label(std::string_view label) {
  const auto n = normalize_answer(label);
  return n == "nei" || n == "not enough info" || n == "not enough information" ||
         n == "unanswerable";
}

bool is_abstain(const EvalRecord& r) {
  if (!r.prediction) return true;
  // Predicting the NEI label is how a label-abstain system abstains.
  return r.regime == Regime::kLabelAbstain && is_unanswerable_label(*r.prediction);
}

bool answered_correctly(const EvalRecord& r) {
  return !is_abstain(r) && normalize_answer(*r.prediction) == normalize_answer(r.gold);
}

double SelectiveSummary::raw_accuracy() const {
  if (!(n > 0.0)) return 0.0;
  const double correct =
      regime == Regime::kLabelAbstain ? answered_correct + correct_abstain : answered_correct;
  return correct / n;
}

std::optional<double> SelectiveSummary::actionable_accuracy() const {
  if (!(answered() > 0.0)) return std::nullopt;
  return answered_correct / answered();
}

double SelectiveSummary::abstain_rate() const { return n > 0.0 ? abstains() / n : 0.0; }

std::optional<double> SelectiveSummary::abstain_precision() const {
  if (!(abstains() > 0.0)) return std::nullopt;
  return correct_abstain / abstains();
}

SelectiveSummary summarize(std::span<const EvalRecord> records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  SelectiveSummary s;
  s.regime = records.front().regime;
  for (const auto& r : records) {
    if (r.regime != s.regime) throw std::invalid_argument("summarize: mixed regimes");
    s.n += 1.0;
    if (is_abstain(r)) {
      (is_unanswerable_label(r.gold) ? s.correct_abstain : s.wrong_abstain) += 1.0;
    } else if (answered_correctly(r)) {
      s.answered_correct += 1.0;
    } else {
      s.answered_wrong += 1.0;
    }
  }
  return s;
}

double selective_score(const SelectiveSummary& s, double alpha) {
  if (s.regime != Regime::kLabelAbstain) {
    throw std::invalid_argument("selective_score needs a label-abstain summary");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
  if (!(s.n > 0.0)) throw std::invalid_argument("selective_score: empty summary");
  return (s.answered_correct + s.correct_abstain + alpha * s.wrong_abstain) / s.n;
}

double utility(const SelectiveSummary& s, double lambda, double r) {
  if (s.regime != Regime::kCoverage) {
    throw std::invalid_argument("utility needs a coverage summary");
  }
  if (!(lambda >= 0.0) || !(r >= 0.0)) throw std::invalid_argument("lambda and r must be >= 0");
  return s.answered_correct - lambda * s.answered_wrong + r * s.abstains();
}

std::vector<RiskCoveragePoint> risk_coverage(std::span<const EvalRecord> records) {
  std::vector<RiskCoveragePoint> points;
  if (records.empty()) return points;
  const double n = static_cast<double>(records.size());
  const bool sweep = std::all_of(records.begin(), records.end(),
                                 [](const EvalRecord& r) { return r.confidence.has_value(); });
  auto point_for = [&](std::optional<double> threshold) {
    double answered = 0.0;
    double wrong = 0.0;
    for (const auto& r : records) {
      if (is_abstain(r)) continue;
      if (threshold && *r.confidence < *threshold) continue;
      answered += 1.0;
      if (!answered_correctly(r)) wrong += 1.0;
    }
    RiskCoveragePoint p;
    p.threshold = threshold;
    p.coverage = answered / n;
    if (answered > 0.0) p.risk = wrong / answered;
    return p;
  };
  if (!sweep) {
    points.push_back(point_for(std::nullopt));
    return points;
  }
  std::vector<double> thresholds;
  for (const auto& r : records) {
    if (!is_abstain(r)) thresholds.push_back(*r.confidence);
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  if (thresholds.empty()) {
    points.push_back(point_for(std::nullopt));
    return points;
  }
  for (double t : thresholds) points.push_back(point_for(t));
  return points;
}

Stability stability(std::span<const double> values, bool population) {
  if (values.size() < 2) throw std::invalid_argument("stability needs at least two seeds");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (population ? n : n - 1.0))};
}

SelectiveSummary average_summaries(std::span<const SelectiveSummary> per_seed) {
  if (per_seed.empty()) throw std::invalid_argument("average_summaries: nothing to average");
  SelectiveSummary avg;
  avg.regime = per_seed.front().regime;
  for (const auto& s : per_seed) {
    if (s.regime != avg.regime) throw std::invalid_argument("average_summaries: mixed regimes");
    avg.n += s.n;
    avg.answered_correct += s.answered_correct;
    avg.answered_wrong += s.answered_wrong;
    avg.correct_abstain += s.correct_abstain;
    avg.wrong_abstain += s.wrong_abstain;
  }
  const double k = static_cast<double>(per_seed.size());
  avg.n /= k;
  avg.answered_correct /= k;
  avg.answered_wrong /= k;
  avg.correct_abstain /= k;
  avg.wrong_abstain /= k;
  return avg;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pct(const std::optional<double>& v, const char* f = "%.2f%%") {
  return v ? fmt(f, *v * 100.0) : "NA";
}

// Shortest round-trip-ish rendering for parameters in headers.
std::string param(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string selective_table_csv(const std::string& method, const SelectiveSummary& s,
                                double alpha, const std::optional<Stability>& stab) {
  std::ostringstream out;
  out << "Method,Raw Acc.,Selective (\xCE\xB1=" << param(alpha)
      << "),Abstain Rate,Abstain Prec.,Stability (Std)\n";
  out << method << ',' << pct(s.raw_accuracy()) << ',' << fmt("%.4f", selective_score(s, alpha))
      << ',' << pct(s.abstain_rate(), "%.1f%%") << ',' << pct(s.abstain_precision(), "%.1f%%")
      << ',' << (stab ? fmt("\xC2\xB1%.2f%%", stab->std) : std::string("NA")) << '\n';
  return out.str();
}

std::string coverage_table_csv(const std::string& method, std::span<const EvalRecord> records,
                               const SelectiveSummary& s, double lambda, double r) {
  std::map<std::string, std::pair<double, int>> by_cat;
  double score_sum = 0.0;
  int scored = 0;
  for (const auto& rec : records) {
    if (!rec.llm_score) continue;
    score_sum += *rec.llm_score;
    ++scored;
    if (rec.category) {
      auto& [sum, cnt] = by_cat[normalize_answer(*rec.category)];
      sum += *rec.llm_score;
      ++cnt;
    }
  }
  auto cat = [&](const char* key) -> std::string {
    auto it = by_cat.find(key);
    if (it == by_cat.end() || it->second.second == 0) return "NA";
    return fmt("%.2f", it->second.first / it->second.second);
  };
  std::ostringstream out;
  out << "Method,Single-Hop,Multi-Hop,Open-Domain,Temporal,Accuracy,Wrong Ans.,Act. Acc.,"
      << "Utility (\xCE\xBB=" << param(lambda) << ", r=" << param(r) << ")\n";
  const std::string accuracy =
      scored > 0 ? fmt("%.2f", score_sum / scored) : fmt("%.2f", s.raw_accuracy() * 100.0);
  out << method << ',' << cat("single-hop") << ',' << cat("multi-hop") << ','
      << cat("open-domain") << ',' << cat("temporal") << ',' << accuracy << ','
      << fmt("%.0f", s.answered_wrong) << ',' << pct(s.actionable_accuracy()) << ','
      << fmt("%.1f", utility(s, lambda, r)) << '\n';
  return out.str();
}

std::string alpha_sweep_csv(const SelectiveSummary& s, std::span<const double> alphas) {
  std::ostringstream out;
  out << "alpha,selective_score\n";
  for (double a : alphas) out << param(a) << ',' << fmt("%.6f", selective_score(s, a)) << '\n';
  return out.str();
}

std::string risk_coverage_csv(std::span<const RiskCoveragePoint> points) {
  std::ostringstream out;
  out << "threshold,coverage,risk\n";
  for (const auto& p : points) {
    out << (p.threshold ? fmt("%.6f", *p.threshold) : std::string("NA")) << ','
        << fmt("%.6f", p.coverage) << ',' << (p.risk ? fmt("%.6f", *p.risk) : std::string("NA"))
        << '\n';
  }
  return out.str();
}

}  // namespace mma
