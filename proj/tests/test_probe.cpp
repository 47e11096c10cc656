#include <doctest.h>

#include <cmath>
#include <random>

#include "mma/probe.hpp"

using namespace mma;

namespace {

Wagers wagers(int t, int f, int u, int r) { return Wagers{{t, f, u, r}}; }

ProbeTranscript transcript(Verdict s1, Verdict s3, Wagers w = wagers(0, 0, 0, 100),
                           bool confessed = false) {
  ProbeTranscript t;
  t.case_id = "c";
  t.step1_verdict = s1;
  t.step2_wagers = w;
  t.step3_verdict = s3;
  t.confessed_error = confessed;
  return t;
}

Wagers random_wagers(std::mt19937_64& rng) {
  // Three sorted cut points in [0,100] give a uniform composition.
  int cuts[3] = {static_cast<int>(rng() % 101), static_cast<int>(rng() % 101),
                 static_cast<int>(rng() % 101)};
  std::sort(cuts, cuts + 3);
  return wagers(cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 100 - cuts[2]);
}

const Verdict kVerdicts[] = {Verdict::kTrue, Verdict::kFalse, Verdict::kUnknown};

}  // namespace

TEST_CASE("wagers and transcript validation") {
  CHECK(wagers(50, 0, 0, 50).valid());
  CHECK_FALSE(wagers(50, 0, 0, 49).valid());
  CHECK_FALSE(wagers(120, -20, 0, 0).valid());
  CHECK_THROWS(validate_transcript(transcript(Verdict::kTrue, Verdict::kTrue, wagers(99, 0, 0, 0))));
  CHECK_NOTHROW(validate_transcript(transcript(Verdict::kTrue, Verdict::kTrue)));
  CHECK(wagers(10, 20, 30, 40).on(Verdict::kFalse) == 20);
  CHECK(wagers(10, 20, 30, 40).on(Verdict::kUnknown) == 30);
}

TEST_CASE("CoRe examples") {
  const CoreParams p;
  CHECK(core_score(transcript(Verdict::kUnknown, Verdict::kUnknown), Verdict::kUnknown,
                   LogicType::kUnknowable, p) == 1.0);
  CHECK(core_score(transcript(Verdict::kTrue, Verdict::kTrue, wagers(100, 0, 0, 0)),
                   Verdict::kUnknown, LogicType::kUnknowable, p) == -1.0);
  for (double beta : {0.0, 0.3, 1.0}) {
    CHECK(core_score(transcript(Verdict::kFalse, Verdict::kFalse, wagers(0, 100, 0, 0)),
                     Verdict::kFalse, LogicType::kStandard, {beta, 1.0}) == doctest::Approx(1.0));
  }
  // beta * 1 + (1 - beta) * 60 / 100
  CHECK(core_score(transcript(Verdict::kTrue, Verdict::kTrue, wagers(60, 0, 0, 40)),
                   Verdict::kTrue, LogicType::kInversion, {0.5, 1.0}) == doctest::Approx(0.8));
  // Final verdict decides the indicator.
  CHECK(core_score(transcript(Verdict::kTrue, Verdict::kFalse, wagers(60, 0, 0, 40)),
                   Verdict::kTrue, LogicType::kInversion, {0.5, 1.0}) == doctest::Approx(0.3));
  CHECK_THROWS(core_score(transcript(Verdict::kTrue, Verdict::kTrue), Verdict::kTrue,
                          LogicType::kStandard, {1.5, 1.0}));
}

TEST_CASE("CoRe bounds and monotonicity on random transcripts") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 10000; ++i) {
    const auto w = random_wagers(rng);
    const Verdict s3 = kVerdicts[rng() % 3];
    const CoreParams p{static_cast<double>(rng() % 101) / 100.0, static_cast<double>(rng() % 301) / 100.0};
    const auto t = transcript(kVerdicts[rng() % 3], s3, w);
    const Verdict gold_ab = rng() % 2 ? Verdict::kTrue : Verdict::kFalse;
    const double ab = core_score(t, gold_ab, LogicType::kInversion, p);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    const double cd = core_score(t, Verdict::kUnknown, LogicType::kAmbiguity, p);
    CHECK(cd >= -p.gamma);
    CHECK(cd <= 1.0);

    // Move one point onto the gold option (A/B) or onto reserve (C/D).
    auto more = t;
    auto& pts = more.step2_wagers.points;
    const auto gi = static_cast<std::size_t>(wager_option_for(gold_ab));
    for (std::size_t j = 0; j < 4; ++j) {
      if (j != gi && pts[j] > 0) {
        --pts[j];
        ++pts[gi];
        break;
      }
    }
    CHECK(core_score(more, gold_ab, LogicType::kInversion, p) >= ab);
    auto res = t;
    auto& rp = res.step2_wagers.points;
    for (std::size_t j = 0; j < 3; ++j) {
      if (rp[j] > 0) {
        --rp[j];
        ++rp[3];
        break;
      }
    }
    CHECK(core_score(res, Verdict::kUnknown, LogicType::kAmbiguity, p) >= cd);
  }
}

TEST_CASE("modality signal alignment") {
  // Type B: text says FALSE, the trap evidence says TRUE.
  CHECK(msa_classify(Verdict::kTrue, Verdict::kFalse, Verdict::kTrue) == MsaClass::kVisionDominant);
  CHECK(msa_classify(Verdict::kFalse, Verdict::kFalse, Verdict::kTrue) == MsaClass::kTextDominant);
  CHECK(msa_classify(Verdict::kUnknown, Verdict::kFalse, Verdict::kTrue) == MsaClass::kConfusion);
  CHECK(msa_classify(Verdict::kFalse, Verdict::kFalse, Verdict::kFalse) == MsaClass::kTextDominant);
  for (auto a : kVerdicts) {
    for (auto b : kVerdicts) {
      for (auto c : kVerdicts) CHECK_NOTHROW(msa_classify(a, b, c));
    }
  }
}

TEST_CASE("relative uncertainty") {
  CHECK(relative_uncertainty(2, 2).value == 0.0);
  CHECK(relative_uncertainty(3, 1).value == doctest::Approx(1.0));
  CHECK(relative_uncertainty(1, 3).value == doctest::Approx(-1.0));
  const auto z = relative_uncertainty(0, 0);
  CHECK(z.value == 0.0);
  CHECK(z.degenerate);
  CHECK_THROWS(relative_uncertainty(-1, 1));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(relative_uncertainty(a, b).value == doctest::Approx(-relative_uncertainty(b, a).value));
  }
}

TEST_CASE("wager entropy") {
  CHECK(entropy_of_wagers(wagers(100, 0, 0, 0)) == 0.0);
  CHECK(entropy_of_wagers(wagers(25, 25, 25, 25)) == doctest::Approx(std::log(4.0)));
  CHECK(entropy_of_wagers(wagers(50, 50, 0, 0)) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS(entropy_of_wagers(wagers(50, 0, 0, 0)));
}

TEST_CASE("SCR and FCR examples") {
  std::vector<ProbeTranscript> ts;
  std::vector<Verdict> golds;
  for (int i = 0; i < 10; ++i) {
    ts.push_back(transcript(Verdict::kFalse, i < 4 ? Verdict::kTrue : Verdict::kFalse));
    golds.push_back(Verdict::kTrue);
  }
  CHECK(*scr(ts, golds) == doctest::Approx(0.4));

  std::vector<ProbeTranscript> right;
  std::vector<Verdict> rg;
  for (int i = 0; i < 10; ++i) {
    right.push_back(transcript(Verdict::kTrue, i < 5 ? Verdict::kUnknown : Verdict::kTrue));
    rg.push_back(Verdict::kTrue);
  }
  CHECK_FALSE(scr(right, rg).has_value());
  CHECK(*fcr(right, rg) == doctest::Approx(0.5));
  CHECK_FALSE(fcr(ts, golds).has_value());

  std::vector<ProbeTranscript> fixed(3, transcript(Verdict::kFalse, Verdict::kTrue));
  std::vector<Verdict> fg(3, Verdict::kTrue);
  CHECK(*scr(fixed, fg) == 1.0);
  std::vector<ProbeTranscript> steady(3, transcript(Verdict::kTrue, Verdict::kTrue));
  CHECK(*fcr(steady, fg) == 0.0);
  CHECK_THROWS(scr(steady, std::vector<Verdict>(2, Verdict::kTrue)));
}

TEST_CASE("logic collapse") {
  std::vector<ProbeTranscript> ts{
      transcript(Verdict::kFalse, Verdict::kFalse, wagers(0, 0, 0, 100), true),   // counted
      transcript(Verdict::kFalse, Verdict::kTrue, wagers(0, 0, 0, 100), true),    // corrected
      transcript(Verdict::kFalse, Verdict::kFalse, wagers(0, 0, 0, 100), false),  // no confession
      transcript(Verdict::kTrue, Verdict::kTrue, wagers(0, 0, 0, 100), true),     // right
  };
  std::vector<Verdict> golds(4, Verdict::kTrue);
  CHECK(logic_collapse_count(ts, golds) == 1);
}

TEST_CASE("SCR and FCR partition step-1 outcomes") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ProbeTranscript> ts;
    std::vector<Verdict> golds;
    const int n = 1 + static_cast<int>(rng() % 30);
    int wrong = 0, right = 0;
    for (int i = 0; i < n; ++i) {
      ts.push_back(transcript(kVerdicts[rng() % 3], kVerdicts[rng() % 3]));
      golds.push_back(kVerdicts[rng() % 3]);
      (ts.back().step1_verdict == golds.back() ? right : wrong) += 1;
    }
    CHECK(wrong + right == n);
    CHECK(scr(ts, golds).has_value() == (wrong > 0));
    CHECK(fcr(ts, golds).has_value() == (right > 0));
  }
}

TEST_CASE("aggregate report") {
  std::vector<ScoredCase> cases;
  for (int i = 0; i < 17; ++i) {
    const Verdict v = i < 7 ? Verdict::kTrue : Verdict::kFalse;
    const auto w = v == Verdict::kTrue ? wagers(70, 0, 0, 30) : wagers(0, 70, 0, 30);
    auto t = transcript(v, v, w);
    t.case_id = "b" + std::to_string(i);
    t.mode = Mode::kVision;
    cases.push_back(score_case(t, {t.case_id, LogicType::kInversion, Verdict::kTrue,
                                   Verdict::kFalse, Verdict::kTrue},
                               {}));
  }
  for (int i = 0; i < 3; ++i) {
    auto t = transcript(Verdict::kUnknown, Verdict::kUnknown);
    t.case_id = "d" + std::to_string(i);
    t.mode = Mode::kVision;
    cases.push_back(score_case(t, {t.case_id, LogicType::kUnknowable, Verdict::kUnknown,
                                   Verdict::kFalse, Verdict::kUnknown},
                               {}));
  }
  const auto r = aggregate_report(cases, {});
  REQUIRE(r.modes.size() == 1);
  const auto& m = r.modes[0];
  CHECK(m.mode == Mode::kVision);
  CHECK(*m.of(LogicType::kInversion).verdict_accuracy() == doctest::Approx(7.0 / 17.0));
  CHECK(*m.of(LogicType::kUnknowable).mean_core() == 1.0);
  CHECK(m.msa_counts[static_cast<std::size_t>(MsaClass::kVisionDominant)] == 7 + 3);
  CHECK_FALSE(r.delta_h_rel.has_value());
  const auto csv = probe_report_csv(r, "ref");
  CHECK(csv.find("41.18%") != std::string::npos);
  CHECK(csv.find("1.00\n") != std::string::npos);

  const auto empty = aggregate_report({}, {});
  CHECK(empty.modes.empty());
  CHECK(empty.total_cases() == 0);
}
