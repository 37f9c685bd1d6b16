#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "kepler_arcs/kepler_arcs.hpp"

using namespace kepler_arcs;

namespace {

const char* small_config = R"({
  "schema": "kepler-arcs/config-1",
  "scenarios": [
    {"radius": 0.3, "half_angle": 1.2},
    {"radius": 0.7, "half_angle": 0.3},
    {"p": [0.2, -0.15], "q": [0.15, 0.2], "energy": -1.6}
  ],
  "grid": {"radius": {"min": 0.2, "max": 0.8, "count": 2},
           "half_angle": {"min": 0.4, "max": 2.6, "count": 3}},
  "mesh": 200,
  "bifurcation": {"members": 12, "random_families": 2, "shooting": false,
                  "families": [{"r0": 0.4, "phi0": 1.0}]},
  "seed": 5
})";

Config small() { return parse_config_text(small_config); }

void expect_config_error(const std::string& text) {
  EXPECT_THROW(parse_config_text(text), ConfigError) << text;
}

}  // namespace

TEST(Config, ParsesScenariosGridAndFamilies) {
  const Config c = small();
  EXPECT_EQ(c.scenarios.size(), 3u);
  ASSERT_TRUE(c.grid);
  EXPECT_EQ(c.all_scenarios().size(), 3u + 6u);
  EXPECT_EQ(c.mesh, 200);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.bifurcation.members, 12);
  EXPECT_FALSE(c.bifurcation.shooting);
  EXPECT_EQ(all_families(c).size(), 3u);
}

TEST(Config, EndpointScenarioIsNormalized) {
  const Scenario s = small().all_scenarios()[2];
  const PlanePoint p{0.2, -0.15}, q{0.15, 0.2};
  const double ang = std::acos((p.x * q.x + p.y * q.y) / (norm(p) * norm(q)));
  EXPECT_NEAR(s.radius, 1.6 * norm(p), 1e-14);
  EXPECT_NEAR(s.half_angle, 0.5 * ang, 1e-14);
  EXPECT_LT(distance(s.to_original(s.p()), p), 1e-14);
  EXPECT_LT(distance(s.to_original(s.q()), q), 1e-14);
}

TEST(Config, RejectsBadInput) {
  expect_config_error("{");
  expect_config_error(R"({"scenarios": []})");
  expect_config_error(R"({"schema": "kepler-arcs/config-0"})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "colour": 1})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "scenarios": [{"radius": 1.2, "half_angle": 1.0}]})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "scenarios": [{"radius": 0.3}]})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "scenarios": [{"radius": "a", "half_angle": 1.0}]})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "scenarios": [{"p": [0.1, 0.2]}]})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "mesh": 1})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "mesh": 800, "max_mesh": 400})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "tolerances": {"location": -1}})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "bifurcation": {"ratio": 1.5}})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "bifurcation": {"families": [{"r0": 0.4, "phi0": 4.0}]}})");
  expect_config_error(R"({"schema": "kepler-arcs/config-1", "seed": -3})");
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, RandomFamiliesAreSeededAndAdmissible) {
  std::mt19937_64 a(9), b(9);
  for (int k = 0; k < 50; ++k) {
    const FamilySpec fa = random_family(a), fb = random_family(b);
    EXPECT_EQ(fa.r0, fb.r0);
    EXPECT_EQ(fa.phi0, fb.phi0);
    EXPECT_EQ(fa.branch, fb.branch);
    const auto [ell, p] = fa.resolve();
    EXPECT_GE(ell.eccentricity(), 0.02);
    EXPECT_LE(ell.eccentricity(), 0.98);
    EXPECT_TRUE(contains_point(ell, p, 1e-12));
  }
}

TEST(Report, EnumerateRoundTrips) {
  const RunReport r = run_enumerate(small(), 1);
  const std::string text = emit_report(r);
  const RunReport back = parse_report(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(emit_report(back), text);
  EXPECT_TRUE(r.summary.ok);
  EXPECT_EQ(r.summary.scenarios, 9);
}

TEST(Report, ClassifyRoundTripsAndAgrees) {
  const RunReport r = run_classify(small(), 2);
  const std::string text = emit_report(r);
  EXPECT_EQ(emit_report(parse_report(text)), text);
  EXPECT_EQ(parse_report(text), r);
  EXPECT_TRUE(r.summary.ok);
  EXPECT_EQ(r.summary.disagreements, 0);
  EXPECT_GT(r.summary.minimizers, 0);
  EXPECT_GT(r.summary.non_minimizers, 0);
}

TEST(Report, BifurcateRoundTrips) {
  const RunReport r = run_bifurcate(small(), 2);
  ASSERT_EQ(r.bifurcations.size(), 3u);
  const std::string text = emit_report(r);
  EXPECT_EQ(emit_report(parse_report(text)), text);
  EXPECT_TRUE(r.summary.ok);
}

TEST(Report, IndependentOfThreadCount) {
  const Config c = small();
  EXPECT_EQ(emit_report(run_classify(c, 1)), emit_report(run_classify(c, 3)));
  EXPECT_EQ(emit_report(run_bifurcate(c, 1)), emit_report(run_bifurcate(c, 4)));
}

TEST(Report, RejectsForeignJson) {
  EXPECT_THROW(parse_report("not json"), ReportError);
  EXPECT_THROW(parse_report(R"({"schema": "other"})"), ReportError);
}

TEST(Csv, HeaderQuotingAndLineEndings) {
  CsvTable t({"a", "b"});
  t.add_row({"1", "x,y"});
  t.add_row({"say \"hi\"", "2"});
  EXPECT_EQ(t.str(), "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",2\n");
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
}

TEST(Csv, RunTablesHaveHeaderAndOneRowPerRecord) {
  const RunReport r = run_enumerate(small(), 1);
  const std::string s = enumerate_table(r).str();
  EXPECT_EQ(s.find('\r'), std::string::npos);
  EXPECT_EQ(s.back(), '\n');
  std::size_t lines = 0, arcs = 0;
  for (char ch : s) lines += ch == '\n';
  for (const auto& sc : r.scenarios) arcs += sc.arcs.size();
  EXPECT_GE(lines, arcs + 1);
  EXPECT_EQ(s.substr(0, s.find('\n')).find("label") != std::string::npos, true);
}

TEST(Parallel, KeepsOrderAndPropagatesErrors) {
  const auto v = parallel_map(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_map(20, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                              return i;
                            }),
               std::runtime_error);
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
}

TEST(Svg, ScenarioAndFamilyFiguresAreWellFormed) {
  const Scenario s = make_scenario(0.7, 0.3);
  FigurePanel fp;
  fp.scenario = s;
  fp.title = "R & phi0 <test>";
  for (const auto& arc : enumerate_arcs(s).arcs) fp.arcs.push_back({arc, classify_analytic(arc, s)});
  const std::string a = scenario_figure({fp});
  EXPECT_EQ(a.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n", 0), 0u);
  EXPECT_NE(a.find("version=\"1.1\""), std::string::npos);
  EXPECT_NE(a.find("&amp;"), std::string::npos);
  EXPECT_NE(a.find("&lt;test&gt;"), std::string::npos);
  EXPECT_EQ(a.find("nan"), std::string::npos);
  EXPECT_EQ(a.substr(a.size() - 7), "</svg>\n");
  EXPECT_EQ(a, scenario_figure({fp}));

  FamilySpec spec;
  spec.r0 = 0.4;
  spec.phi0 = 1.0;
  const auto [ell, p] = spec.resolve();
  ScheduleOptions so;
  so.members = 8;
  const PerturbedFamily fam = build_family(ell, p, geometric_schedule(so));
  const std::string b = bifurcation_figure(fam, track_intersections(fam));
  EXPECT_NE(b.find("version=\"1.1\""), std::string::npos);
  EXPECT_EQ(b.find("nan"), std::string::npos);
  EXPECT_NE(b.find("p_f"), std::string::npos);
}
