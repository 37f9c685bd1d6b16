#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/variational.hpp"
#include "oracles.hpp"

using namespace kepler_arcs;

namespace {

std::vector<Scenario> random_scenarios(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(0.03, 0.97), ua(0.02, pi - 0.02);
  std::vector<Scenario> out;
  while (static_cast<int>(out.size()) < n) {
    const double R = ur(rng), a = ua(rng);
    if (std::abs(R - 0.5) < 1e-3) continue;
    if (R > 0.5) {
      const double b = std::asin((1.0 - R) / R);
      if (std::abs(a - b) < 1e-3 || std::abs(a - (pi - b)) < 1e-3) continue;
    }
    out.push_back(make_scenario(R, a));
  }
  return out;
}

std::set<std::string> labels(const EnumerationResult& r) {
  std::set<std::string> s;
  for (const auto& a : r.arcs) s.insert(a.label.str());
  return s;
}

}  // namespace

TEST(Scenario, RejectsOutOfRangeInput) {
  EXPECT_THROW(make_scenario(0.0, 1.0), ScenarioError);
  EXPECT_THROW(make_scenario(1.0, 1.0), ScenarioError);
  EXPECT_THROW(make_scenario(0.5, 0.0), ScenarioError);
  EXPECT_THROW(make_scenario(0.5, pi), ScenarioError);
  EXPECT_THROW(make_scenario(0.5, 1.0, 0.0), ScenarioError);
}

TEST(Scenario, NormalizationMapsEndpointsBack) {
  const PlanePoint p{0.2, -0.15}, q{-0.05, 0.246};
  const double rq = q.radius(), rp = p.radius();
  const PlanePoint qs = q * (rp / rq);
  const Scenario s = normalize(p, qs, -1.6);
  EXPECT_NEAR(s.radius, 1.6 * rp, 1e-15);
  EXPECT_LT(distance(s.to_original(s.p()), p), 1e-14);
  EXPECT_LT(distance(s.to_original(s.q()), qs), 1e-14);
  EXPECT_LT(distance(s.from_original(p), s.p()), 1e-14);
}

TEST(Scenario, NormalizationRejectsBadEndpoints) {
  EXPECT_THROW(normalize({0.2, 0.0}, {0.0, 0.3}, -1.0), ScenarioError);
  EXPECT_THROW(normalize({0.2, 0.0}, {0.2, 0.0}, -1.0), ScenarioError);
  EXPECT_THROW(normalize({0.8, 0.0}, {0.0, 0.8}, -2.0), ScenarioError);
  EXPECT_THROW(normalize({0.2, 0.0}, {0.0, 0.2}, 1.0), ScenarioError);
}

TEST(Enumeration, ArcCountMatchesExistenceCondition) {
  for (const auto& s : random_scenarios(400, 1)) {
    EXPECT_EQ(static_cast<int>(enumerate_arcs(s).arcs.size()), oracles::arc_count(s.radius, s.half_angle))
        << "R = " << s.radius << " phi0 = " << s.half_angle;
  }
}

TEST(Enumeration, SecondFociMatchCartesianScan) {
  for (const auto& s : random_scenarios(60, 2)) {
    const auto ref = oracles::second_foci_on_axis(s.radius, s.half_angle);
    std::vector<double> got;
    for (const auto& ch : chord_eccentricities(s)) got.push_back(second_focus(ch.ellipse()).x);
    std::sort(got.begin(), got.end());
    ASSERT_EQ(got.size(), ref.size()) << "R = " << s.radius << " phi0 = " << s.half_angle;
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-11);
  }
}

TEST(Enumeration, ArcsJoinPToQWithTheirOrientation) {
  for (const auto& s : random_scenarios(80, 3)) {
    for (const auto& arc : enumerate_arcs(s).arcs) {
      EXPECT_LT(distance(arc.start(), s.p()), 1e-13);
      EXPECT_LT(distance(arc.end(), s.q()), 1e-13);
      EXPECT_EQ(arc.span > 0.0, arc.orientation > 0);
      EXPECT_TRUE(contains_point(arc.ellipse, s.p(), 1e-12));
      EXPECT_TRUE(contains_point(arc.ellipse, s.q(), 1e-12));
    }
  }
}

TEST(Enumeration, LabelsPerRegime) {
  using Set = std::set<std::string>;
  EXPECT_EQ(labels(enumerate_arcs(make_scenario(0.3, 1.0))), (Set{"int+", "int-", "ext+", "ext-"}));
  EXPECT_EQ(labels(enumerate_arcs(make_scenario(0.5, 0.9))), (Set{"circ+", "circ-", "int", "ext"}));
  EXPECT_EQ(labels(enumerate_arcs(make_scenario(0.7, 0.3))), (Set{"ext_1+", "int_1-", "ext_2+", "int_2-"}));
  EXPECT_EQ(labels(enumerate_arcs(make_scenario(0.7, pi - 0.3))), (Set{"int_1+", "ext_1-", "int_2+", "ext_2-"}));
  EXPECT_TRUE(enumerate_arcs(make_scenario(0.7, 1.5)).arcs.empty());
}

TEST(Enumeration, RegimesAndExistenceBound) {
  EXPECT_EQ(classify_regime(make_scenario(0.3, 2.0)), Regime::inside);
  EXPECT_EQ(classify_regime(make_scenario(0.5, 2.0)), Regime::on_circle);
  EXPECT_EQ(classify_regime(make_scenario(0.8, 0.1)), Regime::outside_low_band);
  EXPECT_EQ(classify_regime(make_scenario(0.8, 3.0)), Regime::outside_high_band);
  EXPECT_EQ(classify_regime(make_scenario(0.8, 1.0)), Regime::no_solution);
  const auto r = enumerate_arcs(make_scenario(0.8, 1.0));
  ASSERT_TRUE(r.existence_bound.has_value());
  EXPECT_NEAR(*r.existence_bound, std::asin(0.25), 1e-15);
  for (Regime g : {Regime::inside, Regime::on_circle, Regime::outside_low_band, Regime::outside_high_band,
                   Regime::no_solution}) {
    EXPECT_EQ(regime_from_string(to_string(g)), g);
  }
}

TEST(Enumeration, DegenerateScenarioHasTwoSemicircles) {
  const auto r = enumerate_arcs(make_scenario(0.5, 0.5 * pi));
  ASSERT_EQ(r.arcs.size(), 2u);
  for (const auto& a : r.arcs) {
    EXPECT_TRUE(a.ellipse.is_circle());
    EXPECT_TRUE(a.conjugate_degenerate);
    EXPECT_NEAR(std::abs(a.span), pi, 1e-15);
  }
}

TEST(Enumeration, TangentBoundaryMergesTheTwoEllipses) {
  const double R = 0.7;
  const auto r = enumerate_arcs(make_scenario(R, std::asin((1.0 - R) / R)));
  ASSERT_EQ(r.arcs.size(), 2u);
  EXPECT_TRUE(r.arcs[0].degenerate_boundary);
}

TEST(Labels, ParseRoundTrip) {
  for (const std::string s : {"int+", "int-", "ext_1+", "ext_2-", "circ+", "int", "ext"}) {
    EXPECT_EQ(parse_label(s).str(), s);
  }
  EXPECT_THROW(parse_label("foo+"), std::invalid_argument);
  EXPECT_THROW(parse_label(""), std::invalid_argument);
}

TEST(Classification, MinimizerTableByRegime) {
  auto minimizers = [](const Scenario& s) {
    std::set<std::string> m;
    for (const auto& a : enumerate_arcs(s).arcs) {
      if (classify_analytic(a, s) == Verdict::minimizer) m.insert(a.label.str());
    }
    return m;
  };
  using Set = std::set<std::string>;
  for (const auto& s : random_scenarios(300, 4)) {
    const Regime g = classify_regime(s);
    Set want;
    if (g == Regime::inside) want = {"int+", "int-"};
    if (g == Regime::outside_low_band) want = {"ext_1+", "int_2-"};
    if (g == Regime::outside_high_band) want = {"ext_1-", "int_2+"};
    EXPECT_EQ(minimizers(s), want) << "R = " << s.radius << " phi0 = " << s.half_angle;
  }
  EXPECT_EQ(minimizers(make_scenario(0.5, 0.9)), (Set{"circ+", "int"}));
  EXPECT_EQ(minimizers(make_scenario(0.5, 2.2)), (Set{"circ-", "int"}));
  EXPECT_EQ(minimizers(make_scenario(0.5, 0.5 * pi)), Set{});
}

TEST(Classification, VerdictMatchesAntipodalMembership) {
  for (const auto& s : random_scenarios(300, 5)) {
    for (const auto& a : enumerate_arcs(s).arcs) {
      const bool minimizer = classify_analytic(a, s) == Verdict::minimizer;
      EXPECT_EQ(minimizer, !antipodal_membership(a).on_arc);
    }
  }
}

TEST(Classification, DegenerateScenarioIsUndecided) {
  const Scenario s = make_scenario(0.5, 0.5 * pi);
  for (const auto& a : enumerate_arcs(s).arcs) EXPECT_EQ(classify_analytic(a, s), Verdict::undecided_degenerate);
  for (Verdict v : {Verdict::minimizer, Verdict::non_minimizer, Verdict::undecided_degenerate}) {
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  }
}
