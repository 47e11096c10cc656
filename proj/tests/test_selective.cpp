#include <doctest.h>

#include <cmath>
#include <random>

#include "mma/selective.hpp"

using namespace mma;

namespace {

EvalRecord answer(std::string gold, std::string pred, Regime r = Regime::kLabelAbstain) {
  return {"q", std::move(gold), std::move(pred), r, std::nullopt, std::nullopt, std::nullopt};
}

EvalRecord abstain(std::string gold, Regime r = Regime::kLabelAbstain) {
  return {"q", std::move(gold), std::nullopt, r, std::nullopt, std::nullopt, std::nullopt};
}

SelectiveSummary counts(Regime r, double n, double ac, double aw, double ca, double wa) {
  SelectiveSummary s;
  s.regime = r;
  s.n = n;
  s.answered_correct = ac;
  s.answered_wrong = aw;
  s.correct_abstain = ca;
  s.wrong_abstain = wa;
  return s;
}

}  // namespace

TEST_CASE("summarize counts abstentions by regime") {
  // 500 records: 226 abstains, 104 of them on NEI gold.
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 104; ++i) recs.push_back(abstain("NEI"));
  for (int i = 0; i < 122; ++i) recs.push_back(abstain("SUPPORTS"));
  for (int i = 0; i < 200; ++i) recs.push_back(answer("SUPPORTS", "SUPPORTS"));
  for (int i = 0; i < 74; ++i) recs.push_back(answer("REFUTES", "SUPPORTS"));
  const auto s = summarize(recs);
  CHECK(s.n == 500);
  CHECK(s.abstain_rate() == doctest::Approx(0.452));
  CHECK(*s.abstain_precision() == doctest::Approx(104.0 / 226.0));
  CHECK(std::round(*s.abstain_precision() * 1000) / 10 == doctest::Approx(46.0));
  CHECK(s.answered_correct + s.answered_wrong + s.correct_abstain + s.wrong_abstain == s.n);
  CHECK(s.raw_accuracy() == doctest::Approx((200.0 + 104.0) / 500.0));
  CHECK(*s.actionable_accuracy() == doctest::Approx(200.0 / 274.0));
}

TEST_CASE("trivial summaries") {
  std::vector<EvalRecord> right(5, answer("a", "A"));
  const auto s = summarize(right);
  CHECK(s.raw_accuracy() == 1.0);
  CHECK(s.abstain_rate() == 0.0);
  CHECK_FALSE(s.abstain_precision().has_value());

  std::vector<EvalRecord> nei(4, abstain("NOT ENOUGH INFO"));
  const auto t = summarize(nei);
  CHECK(t.raw_accuracy() == 1.0);
  CHECK(*t.abstain_precision() == 1.0);
  CHECK_FALSE(t.actionable_accuracy().has_value());

  CHECK_THROWS(summarize({}));
  std::vector<EvalRecord> mixed{answer("a", "a"), answer("a", "a", Regime::kCoverage)};
  CHECK_THROWS(summarize(mixed));
}

TEST_CASE("predicting NEI abstains in the label regime only") {
  CHECK(is_abstain(answer("NEI", "not enough info")));
  CHECK_FALSE(is_abstain(answer("NEI", "not enough info", Regime::kCoverage)));
  std::vector<EvalRecord> cov{abstain("x", Regime::kCoverage), answer("x", "x", Regime::kCoverage)};
  const auto s = summarize(cov);
  CHECK(s.raw_accuracy() == 0.5);
}

TEST_CASE("selective score reconstruction") {
  // raw 0.5993 with 122.6 wrong abstentions out of 500.
  const double ab_ok = 0.5993 * 500;
  const auto mma_s = counts(Regime::kLabelAbstain, 500, ab_ok, 500 - ab_ok - 122.6, 0, 122.6);
  CHECK(selective_score(mma_s, 0.2) == doctest::Approx(0.64834).epsilon(1e-9));
  const double base_ok = 0.5987 * 500;
  const auto base = counts(Regime::kLabelAbstain, 500, base_ok, 500 - base_ok - 120.3, 0, 120.3);
  CHECK(selective_score(base, 0.2) == doctest::Approx(0.64682).epsilon(1e-9));
  CHECK(selective_score(mma_s, 0.0) == doctest::Approx(mma_s.raw_accuracy()));
  CHECK_THROWS(selective_score(counts(Regime::kCoverage, 1, 1, 0, 0, 0), 0.2));
  CHECK_THROWS(selective_score(mma_s, 1.5));
}

TEST_CASE("selective score is affine in alpha") {
  const auto s = counts(Regime::kLabelAbstain, 100, 50, 20, 10, 20);
  const double a0 = selective_score(s, 0.0), a5 = selective_score(s, 0.5), a1 = selective_score(s, 1.0);
  CHECK(a5 == doctest::Approx((a0 + a1) / 2));
  CHECK(a1 >= a5);
  CHECK(a1 == doctest::Approx((50.0 + 10 + 20) / 100));
}

TEST_CASE("utility reconstruction") {
  const auto st = counts(Regime::kCoverage, 1542, 1166, 298, 0, 78);
  CHECK(utility(st, 1.0, 0.2) == doctest::Approx(883.6).epsilon(1e-12));
  CHECK(utility(st, 2.0, 0.5) == doctest::Approx(609.0).epsilon(1e-12));
  CHECK(utility(st, 0.0, 0.0) == 1166);
  CHECK(utility(st, 2.0, 0.2) < utility(st, 1.0, 0.2));
  CHECK(utility(st, 1.0, 0.5) > utility(st, 1.0, 0.2));
  CHECK(utility(counts(Regime::kCoverage, 10, 10, 0, 0, 0), 1.0, 0.2) == 10);
  CHECK_THROWS(utility(st, -1.0, 0.2));
  CHECK_THROWS(utility(counts(Regime::kLabelAbstain, 1, 1, 0, 0, 0), 1.0, 0.2));
}

TEST_CASE("risk coverage") {
  std::vector<EvalRecord> half{answer("a", "a", Regime::kCoverage), answer("a", "b", Regime::kCoverage)};
  auto p = risk_coverage(half);
  REQUIRE(p.size() == 1);
  CHECK(p[0].coverage == 1.0);
  CHECK(*p[0].risk == 0.5);

  std::vector<EvalRecord> none{abstain("a", Regime::kCoverage)};
  p = risk_coverage(none);
  CHECK(p[0].coverage == 0.0);
  CHECK_FALSE(p[0].risk.has_value());

  // Sweep against a brute-force count.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 200; ++i) {
    auto r = rng() % 5 == 0 ? abstain("a", Regime::kCoverage)
                            : answer("a", rng() % 3 ? "a" : "b", Regime::kCoverage);
    r.confidence = std::round(u(rng) * 50) / 50;
    recs.push_back(r);
  }
  const auto curve = risk_coverage(recs);
  REQUIRE(curve.size() > 1);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double th = *curve[i].threshold;
    double answered = 0, wrong = 0;
    for (const auto& r : recs) {
      if (!r.prediction || *r.confidence < th) continue;
      ++answered;
      if (*r.prediction != r.gold) ++wrong;
    }
    CHECK(curve[i].coverage == doctest::Approx(answered / recs.size()));
    CHECK(*curve[i].risk == doctest::Approx(wrong / answered));
    CHECK(curve[i].coverage >= 0.0);
    CHECK(curve[i].coverage <= 1.0);
    if (i > 0) CHECK(curve[i].coverage <= curve[i - 1].coverage);
  }
}

TEST_CASE("stability uses the sample standard deviation") {
  const std::vector<double> triple{58.31, 59.93, 61.55};
  const auto s = stability(triple);
  CHECK(s.mean == doctest::Approx(59.93));
  CHECK(s.std == doctest::Approx(1.62).epsilon(1e-9));
  const std::vector<double> same{3, 3, 3};
  CHECK(stability(same).std == 0.0);
  const std::vector<double> two{1.0, 4.0};
  CHECK(stability(two).std == doctest::Approx(3.0 / std::sqrt(2.0)));
  CHECK(stability(triple, true).std == doctest::Approx(1.62 * std::sqrt(2.0 / 3.0)));
  CHECK_THROWS(stability(std::vector<double>{1.0}));
}

TEST_CASE("summaries partition N on random record sets") {
  std::mt19937_64 rng(14);
  const char* labels[] = {"SUPPORTS", "REFUTES", "NEI"};
  for (int t = 0; t < 200; ++t) {
    std::vector<EvalRecord> recs;
    const auto regime = t % 2 ? Regime::kCoverage : Regime::kLabelAbstain;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 60); i < n; ++i) {
      const std::string gold = labels[rng() % 3];
      recs.push_back(rng() % 4 == 0 ? abstain(gold, regime) : answer(gold, labels[rng() % 3], regime));
    }
    const auto s = summarize(recs);
    CHECK(s.answered_correct + s.answered_wrong + s.correct_abstain + s.wrong_abstain == s.n);
  }
}

TEST_CASE("seed averaging and tables") {
  const auto a = counts(Regime::kLabelAbstain, 500, 200, 70, 100, 130);
  const auto b = counts(Regime::kLabelAbstain, 500, 210, 60, 101, 129);
  const std::vector<SelectiveSummary> seeds{a, b};
  const auto avg = average_summaries(seeds);
  CHECK(avg.answered_correct == 205);
  CHECK(avg.correct_abstain == 100.5);

  const auto csv = selective_table_csv("MMA", avg, 0.2, Stability{60.0, 1.62});
  CHECK(csv.rfind("Method,Raw Acc.,Selective (\xCE\xB1=0.2),Abstain Rate,Abstain Prec.,Stability (Std)\n", 0) == 0);
  CHECK(csv.find("\xC2\xB1" "1.62%") != std::string::npos);

  const std::vector<double> alphas{0.0, 0.1, 0.2};
  const auto sweep = alpha_sweep_csv(avg, alphas);
  CHECK(sweep.rfind("alpha,selective_score\n0,", 0) == 0);

  const auto st = counts(Regime::kCoverage, 1542, 1166, 298, 0, 78);
  const auto table = coverage_table_csv("st", {}, st, 1.0, 0.2);
  CHECK(table.find("883.6") != std::string::npos);
  CHECK(table.find("79.64%") != std::string::npos);
}
