// Per-scenario and per-family pipelines assembled into run reports.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "kepler_arcs/bifurcation.hpp"
#include "kepler_arcs/config.hpp"
#include "kepler_arcs/dynamics.hpp"
#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/parallel.hpp"
#include "kepler_arcs/report.hpp"
#include "kepler_arcs/variational.hpp"

namespace kepler_arcs {

/// Acceptance thresholds of the bifurcation checks.
struct BifurcationThresholds {
  double min_order = 0.9;
  double limit_tol = 1e-8;
  double slope_tol = 1e-10;
  double parameter_tol = 1e-6;
  double velocity_tol = 1e-6;
  double direction_tol = 1e-7;
};

inline ArcRecord arc_record(const KeplerArc& arc, const Scenario& s) {
  ArcRecord a;
  a.label = arc.label.str();
  a.eccentricity = arc.ellipse.eccentricity();
  a.phi_prime = arc.ellipse.phi_prime();
  a.start_angle = arc.start_angle;
  a.span = arc.span;
  a.orientation = arc.orientation;
  const TimedArc ta = time_parameterize(arc);
  a.transfer_time = 2.0 * ta.half_time();
  a.transfer_time_original = 2.0 * denormalize(ta, s).half_time();
  a.degenerate_boundary = arc.degenerate_boundary;
  a.conjugate_degenerate = arc.conjugate_degenerate;
  return a;
}

inline ScenarioRecord enumerate_scenario(const Scenario& s) {
  ScenarioRecord rec;
  rec.radius = s.radius;
  rec.half_angle = s.half_angle;
  rec.energy = s.energy;
  rec.rotation = s.rotation;
  const EnumerationResult res = enumerate_arcs(s);
  rec.regime = to_string(res.regime);
  rec.existence_bound = res.existence_bound;
  for (const auto& arc : res.arcs) rec.arcs.push_back(arc_record(arc, s));
  if (res.regime == Regime::no_solution) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "no arcs: phi0 lies outside the existence band (0, %.6g) U (%.6g, pi)",
                  *res.existence_bound, pi - *res.existence_bound);
    rec.notes.push_back(buf);
  }
  if (s.degenerate()) rec.notes.push_back("degenerate scenario: q is conjugate to p along both semicircles");
  for (const auto& arc : res.arcs) {
    if (arc.degenerate_boundary) {
      rec.notes.push_back("tangent configuration: the two ellipses coincide on the band boundary");
      break;
    }
  }
  return rec;
}

inline ScenarioRecord classify_scenario(const Scenario& s, const MinimalityOptions& opt) {
  ScenarioRecord rec = enumerate_scenario(s);
  const EnumerationResult res = enumerate_arcs(s);
  for (std::size_t i = 0; i < res.arcs.size(); ++i) rec.arcs[i].minimality = analyze_arc(res.arcs[i], s, opt);
  return rec;
}

inline MinimalityOptions minimality_options(const Config& c) {
  MinimalityOptions o;
  o.intervals = c.mesh;
  o.max_intervals = c.max_mesh;
  o.rel_threshold = c.tolerances.eigen_relative;
  o.location_tol = c.tolerances.location;
  return o;
}

inline BifurcationRecord bifurcate_family(const FamilySpec& spec, const BifurcationConfig& bc,
                                          const BifurcationThresholds& th = {}) {
  BifurcationRecord rec;
  const auto [ell, p] = spec.resolve();
  rec.eccentricity = ell.eccentricity();
  rec.phi_prime = ell.phi_prime();
  rec.anchor_x = p.x;
  rec.anchor_y = p.y;

  ScheduleOptions so;
  so.members = bc.members;
  so.first = ell.is_circle() ? std::min(bc.first * 5.0, 0.5) : bc.first;
  so.ratio = bc.ratio;
  const PerturbedFamily fam = build_family(ell, p, geometric_schedule(so), spec.circle_branch);
  rec.r0 = fam.r0;
  rec.phi0 = fam.phi0;
  rec.branch = fam.branch;
  rec.circle = fam.circle;
  rec.warnings = fam.warnings;

  const auto pts = track_intersections(fam);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    MemberRecord m;
    m.n = pts[i].n;
    m.phi_n = pts[i].phi_n;
    m.e_n = fam.members[i].e_n;
    m.psi = pts[i].psi;
    m.radius = pts[i].radius;
    m.x = pts[i].point.x;
    m.y = pts[i].point.y;
    m.distance = pts[i].distance_to_antipode;
    rec.members.push_back(m);
  }

  if (fam.circle) {
    // p_n -> -p with e_n -> 0; distances must shrink.
    for (std::size_t i = 1; i < rec.members.size(); ++i) {
      if (!(rec.members[i].distance < rec.members[i - 1].distance)) rec.ok = false;
    }
    return rec;
  }

  const BifurcationLimit lim = limit_point(fam);
  const ConvergenceSummary cs = convergence(pts, lim);
  LimitRecord lr;
  lr.psi_star = lim.psi_star;
  lr.r_star = lim.r_star;
  lr.m = lim.m;
  lr.m_star = lim.m_star;
  lr.m_chord = lim.m_chord;
  lr.antipode_gap = lim.antipode_gap;
  lr.collinearity = lim.collinearity;
  lr.order = cs.order;
  lr.psi_error = cs.psi_error;
  lr.r_error = cs.r_error;
  lr.monotone = cs.monotone;
  rec.limit = lr;
  rec.ok = lr.order >= th.min_order && lr.psi_error <= th.limit_tol && lr.r_error <= th.limit_tol &&
           std::abs(lr.m - lr.m_star) <= th.slope_tol && std::abs(lr.m - lr.m_chord) <= th.slope_tol &&
           lr.collinearity <= th.slope_tol && lr.monotone;

  if (bc.shooting) {
    // The initial-velocity gap shrinks like phi_n; the shooting record follows
    // the schedule for ten more members than the tracked family.
    ScheduleOptions longer = so;
    longer.members += 10;
    const PerturbedFamily ext = build_family(ell, p, geometric_schedule(longer), spec.circle_branch);
    const ShootingRecord sh = shooting_bifurcation(ext, track_intersections(ext));
    ShootingSummary ss;
    ss.s_star = sh.s_star;
    ss.s_star_jacobi = sh.s_star_jacobi;
    ss.parameter_gap = sh.final_parameter_gap();
    ss.velocity_gap = sh.final_velocity_gap();
    ss.unique = sh.unique_accumulation;
    for (const auto& m : sh.members) {
      if (!m.shot) continue;
      ++ss.shot_members;
      ss.max_direction_gap = std::max(ss.max_direction_gap, m.direction_gap);
      ss.max_hit_residual = std::max(ss.max_hit_residual, m.hit_residual);
    }
    rec.shooting = ss;
    rec.ok = rec.ok && ss.unique && ss.parameter_gap <= th.parameter_tol && ss.velocity_gap <= th.velocity_tol &&
             std::abs(ss.s_star - ss.s_star_jacobi) <= th.parameter_tol && ss.max_direction_gap <= th.direction_tol;
  }
  return rec;
}

inline void summarize(RunReport& r) {
  RunSummary s;
  s.scenarios = static_cast<int>(r.scenarios.size());
  for (const auto& sc : r.scenarios) {
    for (const auto& a : sc.arcs) {
      ++s.arcs;
      if (!a.minimality) continue;
      switch (a.minimality->analytic) {
        case Verdict::minimizer: ++s.minimizers; break;
        case Verdict::non_minimizer: ++s.non_minimizers; break;
        case Verdict::undecided_degenerate: ++s.undecided; break;
      }
      if (!a.minimality->all_agree()) ++s.disagreements;
    }
  }
  s.families = static_cast<int>(r.bifurcations.size());
  for (const auto& b : r.bifurcations) {
    if (!b.ok) ++s.family_failures;
  }
  s.ok = s.disagreements == 0 && s.family_failures == 0;
  r.summary = s;
}

inline RunReport run_enumerate(const Config& c, int jobs) {
  RunReport r;
  r.command = "enumerate";
  r.seed = c.seed;
  r.mesh = c.mesh;
  const auto scenarios = c.all_scenarios();
  r.scenarios = parallel_map(scenarios.size(), jobs, [&](std::size_t i) { return enumerate_scenario(scenarios[i]); });
  summarize(r);
  return r;
}

inline RunReport run_classify(const Config& c, int jobs) {
  RunReport r;
  r.command = "classify";
  r.seed = c.seed;
  r.mesh = c.mesh;
  const auto scenarios = c.all_scenarios();
  const MinimalityOptions opt = minimality_options(c);
  r.scenarios =
      parallel_map(scenarios.size(), jobs, [&](std::size_t i) { return classify_scenario(scenarios[i], opt); });
  summarize(r);
  return r;
}

/// Configured families, then `random_families` drawn from the seeded generator.
inline std::vector<FamilySpec> all_families(const Config& c) {
  std::vector<FamilySpec> out = c.bifurcation.families;
  std::mt19937_64 rng(c.seed);
  for (int k = 0; k < c.bifurcation.random_families; ++k) out.push_back(random_family(rng, c.bifurcation.first));
  return out;
}

inline RunReport run_bifurcate(const Config& c, int jobs) {
  RunReport r;
  r.command = "bifurcate";
  r.seed = c.seed;
  r.mesh = c.mesh;
  const auto families = all_families(c);
  r.bifurcations = parallel_map(families.size(), jobs,
                                [&](std::size_t i) { return bifurcate_family(families[i], c.bifurcation); });
  summarize(r);
  return r;
}

}  // namespace kepler_arcs
