#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rwsa/verification.hpp"

using namespace rwsa;

namespace {

JetRationalPoly poly(std::initializer_list<std::pair<JetExponents, Rational>> terms) {
  JetRationalPoly p;
  for (const auto& [e, c] : terms) p.add(e, c);
  return p;
}

/// Jets of a(t) = sin t.
std::vector<double> sine_jets(double t) {
  std::vector<double> v(kJetSlots);
  for (int k = 0; k < kJetSlots; ++k) v[k] = std::sin(t + k * M_PI / 2);
  return v;
}

}  // namespace

TEST(Oracles, LoadAndChecksum) {
  const auto o = load_oracles();
  ASSERT_EQ(o.size(), 7u);
  for (int n : {0, 2, 4, 6, 8, 10, 12}) EXPECT_TRUE(o.count(n)) << n;
  EXPECT_EQ(o.at(0).expr, poly({{{3}, Rational(1, 2)}}));
  EXPECT_EQ(o.at(8).prefactor, Rational(-1, 10080));
  EXPECT_EQ(o.at(12).a_power, 8);
  EXPECT_EQ(o.at(12).expr.size(), 117u);
}

TEST(Oracles, PrintedCoefficients) {
  const auto o = load_oracles();
  // 3 a^(10) a^8 over 665280 a^6, in the Q-form a^7.
  JetExponents e10(11, 0);
  e10[0] = 2;
  e10[10] = 1;
  EXPECT_EQ(o.at(10).expr.coeff(e10), Rational(3, 665280));
  // -749700 a'^10 a'' over 17297280 a^8.
  EXPECT_EQ(o.at(12).expr.coeff({-8, 10, 1}), Rational(-749700, 17297280));
}

TEST(Oracles, EditedFileIsRejected) {
  const auto tmp = std::filesystem::temp_directory_path() / "rwsa_oracles_edited.json";
  {
    std::ifstream in(default_oracle_path());
    nlohmann::json doc = nlohmann::json::parse(in);
    doc["oracles"][1]["terms"][0]["coeff"] = "2";
    std::ofstream(tmp) << doc.dump(1);
  }
  EXPECT_THROW(load_oracles(tmp.string()), std::runtime_error);
  std::filesystem::remove(tmp);
}

TEST(Oracles, DiffReportNamesMonomials) {
  const auto o = load_oracles();
  JetRationalPoly wrong = o.at(2).expr;
  wrong.add({1}, Rational(1, 8));
  const DiffReport d = compare_to_closed_form(2, wrong, o);
  EXPECT_FALSE(d.match);
  EXPECT_EQ(d.differing, 1u);
  ASSERT_EQ(d.first_diffs.size(), 1u);
  EXPECT_EQ(d.first_diffs[0], "1: computed -1/8, expected -1/4");
  EXPECT_TRUE(compare_to_closed_form(2, o.at(2).expr, o).match);
}

TEST(Round, Examples) {
  const auto o = load_oracles();
  RoundPoly s3;
  s3.s_part[3] = Rational(1, 2);
  EXPECT_EQ(round_reduce(o.at(0).expr), s3);
  s3.s_part[3] = Rational(-1, 2);
  EXPECT_EQ(round_reduce(o.at(2).expr), s3);
  s3.s_part[3] = reference_round_a12_coefficient();
  EXPECT_EQ(round_reduce(o.at(12).expr), s3);
}

TEST(Round, MatchesFloatEvaluation) {
  const auto o = load_oracles();
  const double t = 0.9;
  for (const auto& [n, oracle] : o) {
    const double direct = oracle.expr.eval_numeric(sine_jets(t));
    const double reduced = round_reduce(oracle.expr).eval(t);
    EXPECT_NEAR(direct, reduced, 1e-9 * std::max(1.0, std::abs(direct))) << n;
  }
}

TEST(Round, NonRegularValueIsRejected) {
  EXPECT_THROW(round_reduce(poly({{{-1}, Rational(1)}})), invariant_violation);
  // a'^2 / a^2 = (1 - S^2) / S^2.
  EXPECT_THROW(round_reduce(poly({{{-2, 2}, Rational(1)}})), invariant_violation);
  // a'^2 + a^2 = C^2 + S^2.
  RoundPoly one;
  one.s_part[0] = Rational(1);
  EXPECT_EQ(round_reduce(poly({{{0, 2}, Rational(1)}, {{2}, Rational(1)}})), one);
}

TEST(Round, Integrals) {
  RoundPoly p;
  p.s_part[3] = Rational(1);
  EXPECT_EQ(integrate_round(p).rational, Rational(4, 3));
  EXPECT_FALSE(integrate_round(p).has_pi());
  RoundPoly c;
  c.s_part[0] = Rational(1);
  EXPECT_EQ(integrate_round(c).pi, Rational(1));
  EXPECT_TRUE(integrate_round(c).rational.is_zero());
  p.s_part[3] = reference_round_a12_coefficient();
  EXPECT_EQ(integrate_round(p).rational, reference_round_a12_integral());
  RoundPoly withc;
  withc.c_part[1] = Rational(1);
  EXPECT_THROW(integrate_round(withc), std::invalid_argument);
}

TEST(HRecursion, ReproducesReferenceValues) {
  const auto h = h_recursion(20);
  for (const auto& [n, v] : reference_h_values()) EXPECT_EQ(h.at(n), v) << n;
  EXPECT_THROW(h_recursion(1), std::invalid_argument);
}

TEST(HRecursion, AgreesWithOracleHighestTerms) {
  const auto h = h_recursion(12);
  for (const auto& [n, oracle] : load_oracles()) {
    if (n == 0) continue;
    EXPECT_EQ(extract_highest(n, oracle.expr), h.at(n)) << n;
  }
  EXPECT_THROW(extract_highest(4, poly({{{1}, Rational(1)}})), invariant_violation);
}

TEST(Grading, OracleQFormsSatisfyTheObservation) {
  for (const auto& [n, oracle] : load_oracles()) EXPECT_TRUE(q_grading_failures(n, oracle.expr).empty()) << n;
  EXPECT_FALSE(q_grading_failures(2, poly({{{1, 1}, Rational(1)}})).empty());
}

TEST(Report, TextAndJson) {
  VerificationReport r;
  r.run("ok", [] { return std::make_pair(true, std::string("fine")); });
  r.run("throws", []() -> std::pair<bool, std::string> { throw std::runtime_error("boom"); });
  EXPECT_FALSE(r.all_passed());
  const std::string text = r.text();
  EXPECT_NE(text.find("PASS ok"), std::string::npos);
  EXPECT_NE(text.find("FAIL throws"), std::string::npos);
  EXPECT_NE(text.find("error: boom"), std::string::npos);
  const auto j = r.json();
  EXPECT_EQ(j["checks"][1]["status"], "fail");
  EXPECT_EQ(j["passed"], false);
}
