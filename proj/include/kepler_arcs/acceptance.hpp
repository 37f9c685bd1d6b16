// The nine acceptance checks, shared by the acceptance test binary and the
// `verify` subcommand.
#pragma once

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kepler_arcs/bifurcation.hpp"
#include "kepler_arcs/config.hpp"
#include "kepler_arcs/dynamics.hpp"
#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/parallel.hpp"
#include "kepler_arcs/pipeline.hpp"
#include "kepler_arcs/variational.hpp"

namespace kepler_arcs {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;

  std::string line() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2f s)", seconds);
    return std::string(passed ? "PASS" : "FAIL") + " criterion " + std::to_string(id) + " [" + name + "]: " +
           detail + buf;
  }
};

struct AcceptanceOptions {
  int jobs = 1;
  std::uint64_t seed = 20240601;
  int grid_size = 50;
  int mesh = 400;
};

namespace acceptance {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// Arc count from the closed-form existence condition: 4 for R < 1/2, and
/// for R > 1/2 either 4 (phi0 inside a band) or 0. R = 1/2 gives 4, or 2 at phi0 = pi/2.
inline int expected_arc_count(double radius, double half_angle) {
  if (std::abs(radius - 0.5) < circle_radius_tol) return std::abs(half_angle - 0.5 * pi) < right_angle_tol ? 2 : 4;
  if (radius < 0.5) return 4;
  return std::sin(half_angle) < (1.0 - radius) / radius ? 4 : 0;
}

/// The minimizing arcs for each regime, by label.
inline std::set<std::string> expected_minimizers(Regime regime, double half_angle) {
  switch (regime) {
    case Regime::inside: return {"int+", "int-"};
    case Regime::on_circle:
      if (std::abs(half_angle - 0.5 * pi) < right_angle_tol) return {};
      return half_angle < 0.5 * pi ? std::set<std::string>{"circ+", "int"} : std::set<std::string>{"circ-", "int"};
    case Regime::outside_low_band: return {"ext_1+", "int_2-"};
    case Regime::outside_high_band: return {"ext_1-", "int_2+"};
    case Regime::no_solution: return {};
  }
  return {};
}

/// Moves phi0 (or R) at least `gap` away from every case boundary, keeping its side.
inline Scenario nudged_scenario(double radius, double half_angle, double gap, bool* moved = nullptr) {
  bool m = false;
  if (std::abs(radius - 0.5) < gap) {
    radius = radius < 0.5 ? 0.5 - gap : 0.5 + gap;
    m = true;
  }
  if (radius > 0.5) {
    const double b = std::asin((1.0 - radius) / radius);
    for (double edge : {b, pi - b}) {
      if (std::abs(half_angle - edge) < gap) {
        half_angle = half_angle < edge ? edge - gap : edge + gap;
        m = true;
      }
    }
  }
  if (moved) *moved = m;
  return make_scenario(radius, half_angle);
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

struct GridPoint {
  int i = 0, j = 0;
  Scenario scenario;
  bool nudged = false;
};

/// The full grid over (R, phi0), row-major in R.
inline std::vector<GridPoint> main_grid(int n) {
  const auto rs = linspace(0.05, 0.95, n);
  const auto as = linspace(0.05, pi - 0.05, n);
  std::vector<GridPoint> out;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      GridPoint g;
      g.i = i;
      g.j = j;
      g.scenario = nudged_scenario(rs[i], as[j], 1.5e-3, &g.nudged);
      out.push_back(g);
    }
  }
  return out;
}

/// Every fifth row and column starting at index 2 (10 x 10 for n = 50).
inline std::vector<Scenario> sub_grid(int n) {
  std::vector<Scenario> out;
  for (const auto& g : main_grid(n)) {
    if (g.i % 5 == 2 && g.j % 5 == 2) out.push_back(g.scenario);
  }
  return out;
}

struct AnalyzedArc {
  Scenario scenario;
  KeplerArc arc;
  MinimalityReport report;
};

}  // namespace acceptance

/// Runs the criteria; the sub-grid minimality analysis is computed once and
/// shared by criteria 3 to 6.
class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions opt = {}) : opt_(opt) {}

  std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> out;
    for (int k = 1; k <= 9; ++k) out.push_back(run(k));
    return out;
  }

  CriterionResult run(int id) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    switch (id) {
      case 1: r = enumeration_exactness(); break;
      case 2: r = dynamics_consistency(); break;
      case 3: r = classification_reproduction(); break;
      case 4: r = three_way_agreement(); break;
      case 5: r = conjugate_equals_antipodal(); break;
      case 6: r = morse_index_theorem(); break;
      case 7: r = bifurcation_convergence(); break;
      case 8: r = closed_ellipse_non_minimality(); break;
      case 9: r = variational_calculus(); break;
      default: throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
    }
    r.id = id;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }

  CriterionResult enumeration_exactness() {
    CriterionResult r;
    r.name = "enumeration exactness";
    const auto grid = acceptance::main_grid(opt_.grid_size);
    int mismatches = 0, nudged = 0;
    std::map<int, int> counts;
    for (const auto& g : grid) {
      nudged += g.nudged;
      const int got = static_cast<int>(enumerate_arcs(g.scenario).arcs.size());
      const int want = acceptance::expected_arc_count(g.scenario.radius, g.scenario.half_angle);
      ++counts[got];
      if (got != want) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(grid.size()) + " scenarios, " + std::to_string(mismatches) + " mismatches, " +
               std::to_string(nudged) + " nudged off a boundary, counts";
    for (const auto& [c, n] : counts) r.detail += " " + std::to_string(c) + ":" + std::to_string(n);
    return r;
  }

  CriterionResult dynamics_consistency() {
    CriterionResult r;
    r.name = "dynamics consistency";
    struct Errors {
      double pointwise = 0.0, drift = 0.0, endpoint = 0.0;
    };
    const auto scenarios = acceptance::sub_grid(opt_.grid_size);
    std::vector<KeplerArc> arcs;
    for (const auto& s : scenarios) {
      for (const auto& a : enumerate_arcs(s).arcs) arcs.push_back(a);
    }
    const auto errs = parallel_map(arcs.size(), opt_.jobs, [&](std::size_t k) {
      Errors e;
      const TimedArc ta = time_parameterize(arcs[k]);
      const double w = ta.half_time();
      const int samples = 64;
      std::vector<double> times;
      for (int i = 0; i <= samples; ++i) times.push_back(2.0 * w * i / samples);
      const KeplerState x0 = ta.state(-w);
      const Trajectory tr = integrate_ode(x0, 2.0 * w, 1e-13, times);
      for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const KeplerState exact = ta.state(tr.times[i] - w);
        e.pointwise = std::max(e.pointwise, distance(tr.states[i].position, exact.position));
        e.drift = std::max(e.drift, std::abs(tr.states[i].energy() - x0.energy()));
      }
      const PlanePoint p = arcs[k].start(), q = arcs[k].end();
      e.endpoint = std::max({distance(ta.state(-w).position, p), distance(ta.state(w).position, q),
                             distance(tr.states.back().position, q)});
      return e;
    });
    Errors worst;
    for (const auto& e : errs) {
      worst.pointwise = std::max(worst.pointwise, e.pointwise);
      worst.drift = std::max(worst.drift, e.drift);
      worst.endpoint = std::max(worst.endpoint, e.endpoint);
    }
    r.passed = worst.pointwise <= 1e-8 && worst.drift <= 1e-9 && worst.endpoint <= 1e-10;
    r.detail = std::to_string(arcs.size()) + " arcs, max pointwise " + acceptance::fmt("%.2e", worst.pointwise) +
               ", energy drift " + acceptance::fmt("%.2e", worst.drift) + ", endpoint residual " +
               acceptance::fmt("%.2e", worst.endpoint);
    return r;
  }

  CriterionResult classification_reproduction() {
    CriterionResult r;
    r.name = "classification reproduction";
    int mismatches = 0, scenarios = 0;
    for (const auto& s : acceptance::sub_grid(opt_.grid_size)) {
      const auto res = enumerate_arcs(s);
      if (res.arcs.empty()) continue;
      ++scenarios;
      std::set<std::string> got;
      for (const auto& a : res.arcs) {
        if (classify_analytic(a, s) == Verdict::minimizer) got.insert(a.label.str());
      }
      if (got != acceptance::expected_minimizers(res.regime, s.half_angle)) ++mismatches;
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(scenarios) + " scenarios with arcs, " + std::to_string(mismatches) + " mismatches";
    return r;
  }

  CriterionResult three_way_agreement() {
    CriterionResult r;
    r.name = "three-way agreement";
    int checked = 0, disagreements = 0;
    for (const auto& a : analyzed()) {
      if (a.report.analytic == Verdict::undecided_degenerate) continue;
      ++checked;
      if (!(a.report.morse_agrees && a.report.jacobi_agrees)) ++disagreements;
    }
    r.passed = disagreements == 0 && checked > 0;
    r.detail = std::to_string(checked) + " arcs, " + std::to_string(disagreements) + " disagreements";
    return r;
  }

  CriterionResult conjugate_equals_antipodal() {
    CriterionResult r;
    r.name = "conjugate point = antipodal point";
    int non_min = 0, failures = 0;
    double worst = 0.0;
    for (const auto& a : analyzed()) {
      if (a.report.analytic != Verdict::non_minimizer) continue;
      ++non_min;
      const double d = a.report.conjugate_antipodal_distance;
      if (d < 0.0 || d > 1e-6) ++failures;
      worst = std::max(worst, d);
    }
    const Scenario deg = make_scenario(0.5, 0.5 * pi);
    double endpoint_gap = 0.0;
    int semicircles = 0;
    bool degenerate_ok = true;
    for (const auto& arc : enumerate_arcs(deg).arcs) {
      ++semicircles;
      const GeodesicSampler g(time_parameterize(arc));
      const auto cps = jacobi_conjugate_points(g);
      bool found = false;
      for (const auto& c : cps) {
        if (c.parameter < 1.0 - 1e-6) degenerate_ok = false;
        else if (std::abs(c.parameter - 1.0) <= 1e-6) {
          found = true;
          endpoint_gap = std::max(endpoint_gap, std::abs(c.parameter - 1.0));
        }
      }
      degenerate_ok = degenerate_ok && found;
    }
    degenerate_ok = degenerate_ok && semicircles == 2;
    r.passed = failures == 0 && non_min > 0 && degenerate_ok;
    r.detail = std::to_string(non_min) + " non-minimizers, max |gamma(s*) - p_f| " + acceptance::fmt("%.2e", worst) +
               ", degenerate semicircles " + (degenerate_ok ? "s* = 1" : "FAILED") + " (max |s* - 1| " +
               acceptance::fmt("%.2e", endpoint_gap) + ")";
    return r;
  }

  CriterionResult morse_index_theorem() {
    CriterionResult r;
    r.name = "Morse index theorem";
    int checked = 0, failures = 0;
    std::map<int, int> histogram;
    for (const auto& a : analyzed()) {
      ++checked;
      if (a.report.morse_index != a.report.interior_multiplicity()) ++failures;
      if (a.report.analytic == Verdict::non_minimizer) ++histogram[a.report.morse_index];
    }
    r.passed = failures == 0 && checked > 0;
    r.detail = std::to_string(checked) + " arcs, " + std::to_string(failures) + " mismatches, non-minimizer index";
    for (const auto& [idx, n] : histogram) r.detail += " " + std::to_string(idx) + ":" + std::to_string(n);
    return r;
  }

  CriterionResult bifurcation_convergence() {
    CriterionResult r;
    r.name = "bifurcation convergence";
    std::mt19937_64 rng(opt_.seed);
    BifurcationConfig bc;
    bc.shooting = false;
    std::vector<FamilySpec> specs;
    for (int k = 0; k < 20; ++k) specs.push_back(random_family(rng, bc.first));
    const auto recs = parallel_map(specs.size(), opt_.jobs, [&](std::size_t k) { return bifurcate_family(specs[k], bc); });
    int family_failures = 0;
    double min_order = 1e300, worst_limit = 0.0;
    for (const auto& rec : recs) {
      if (!rec.ok || !rec.limit) {
        ++family_failures;
        continue;
      }
      min_order = std::min(min_order, rec.limit->order);
      worst_limit = std::max({worst_limit, rec.limit->psi_error, rec.limit->r_error});
    }

    int slope_failures = 0;
    double worst_slope = 0.0;
    for (int k = 0; k < 500; ++k) {
      const FamilySpec spec = random_family(rng, bc.first);
      const auto [ell, p] = spec.resolve();
      const PerturbedFamily fam = build_family(ell, p, {bc.first}, spec.circle_branch);
      const BifurcationLimit lim = limit_point(fam);
      const double gap = std::max(std::abs(lim.m - lim.m_star), std::abs(lim.m - lim.m_chord));
      worst_slope = std::max(worst_slope, gap);
      if (!(gap <= 1e-10)) ++slope_failures;
    }
    r.passed = family_failures == 0 && slope_failures == 0;
    r.detail = "20 families, " + std::to_string(family_failures) + " failures, min order " +
               acceptance::fmt("%.4f", min_order) + ", max limit error " + acceptance::fmt("%.2e", worst_limit) +
               "; 500 slope checks, " + std::to_string(slope_failures) + " failures, max |m - m*| " +
               acceptance::fmt("%.2e", worst_slope);
    return r;
  }

  CriterionResult closed_ellipse_non_minimality() {
    CriterionResult r;
    r.name = "closed ellipse non-minimality";
    const std::vector<std::pair<double, double>> ellipses{{0.0, 0.0}, {0.2, 0.7}, {0.45, 2.0}, {0.7, 4.0}, {0.9, 5.5}};
    int failures = 0;
    double worst_ratio = -1e300;
    for (const auto& [e, phi_prime] : ellipses) {
      const KeplerEllipse ell(e, phi_prime);
      const PlanePoint p = point_at_angle(ell, 0.3);
      const GeodesicSampler g(time_parameterize(full_orbit_arc(ell, p, +1)));
      const int n = 200;
      GeodesicPath gp = sample_path(g, n);
      gp.nodes.pop_back();
      const Eigen::MatrixXd a = assemble_periodic_hessian(gp.nodes);
      const double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
      const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues()(0);
      const double ratio = lambda_min / nrm;
      worst_ratio = std::max(worst_ratio, ratio);
      if (!(lambda_min < -1e-8 * nrm)) ++failures;
    }
    r.passed = failures == 0;
    r.detail = "5 ellipses, " + std::to_string(failures) + " without a negative direction, largest lambda_min/||A|| " +
               acceptance::fmt("%.3e", worst_ratio);
    return r;
  }

  CriterionResult variational_calculus() {
    CriterionResult r;
    r.name = "variational calculus";
    std::mt19937_64 rng(opt_.seed + 9);
    double worst_grad = 0.0, worst_hess = 0.0;
    int paths = 0;
    while (paths < 100) {
      const auto gp = random_path(rng);
      if (!gp) continue;
      ++paths;
      worst_grad = std::max(worst_grad, gradient_error(*gp));
      worst_hess = std::max(worst_hess, hessian_error(*gp));
    }

    // Truncation error of the midpoint rule decays like N^{-5/2}; arcs passing
    // close to the origin need a finer mesh before it drops below 1e-6 N.
    double worst_j = 0.0;
    int arcs = 0, finest = opt_.mesh, unresolved = 0;
    for (const auto& s : acceptance::sub_grid(opt_.grid_size)) {
      for (const auto& a : enumerate_arcs(s).arcs) {
        ++arcs;
        const TimedArc ta = time_parameterize(a);
        for (int n = opt_.mesh;; n *= 2) {
          const auto g = maupertuis_J_gradient(affine_time_path(ta, n));
          double sq = 0.0;
          for (double v : g) sq += v * v;
          const double ratio = std::sqrt(sq) / n;
          if (ratio <= 1e-6 || n >= 256 * opt_.mesh) {
            worst_j = std::max(worst_j, ratio);
            finest = std::max(finest, n);
            unresolved += ratio > 1e-6;
            break;
          }
        }
      }
    }
    r.passed = worst_grad <= 1e-5 && worst_hess <= 1e-5 && unresolved == 0;
    r.detail = "100 paths, gradient rel. error " + acceptance::fmt("%.2e", worst_grad) + ", Hessian rel. error " +
               acceptance::fmt("%.2e", worst_hess) + "; " + std::to_string(arcs) + " arcs, max |grad J|/N " +
               acceptance::fmt("%.2e", worst_j) + " (finest N " + std::to_string(finest) + ")";
    return r;
  }

  /// Random path with 6 to 30 intervals whose nodes and midpoints stay in 0.1 <= |x| <= 0.9.
  static std::optional<GeodesicPath> random_path(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0), ang(0.0, two_pi);
    std::uniform_int_distribution<int> intervals(6, 30);
    const int n = intervals(rng);
    const PlanePoint a = PlanePoint::from_polar(0.2 + 0.6 * u01(rng), ang(rng));
    const PlanePoint b = PlanePoint::from_polar(0.2 + 0.6 * u01(rng), ang(rng));
    const double amp = 0.15 * (u01(rng) - 0.5);
    const PlanePoint nrm = perp(b - a);
    GeodesicPath gp;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      PlanePoint x = a + (b - a) * s + nrm * (amp * std::sin(pi * s));
      if (i > 0 && i < n) x += PlanePoint{0.01 * (u01(rng) - 0.5), 0.01 * (u01(rng) - 0.5)};
      gp.nodes.push_back(x);
    }
    for (int i = 0; i <= n; ++i) {
      const double ri = gp.nodes[i].radius();
      if (ri < 0.1 || ri > 0.9) return std::nullopt;
      if (i < n) {
        const double rm = ((gp.nodes[i] + gp.nodes[i + 1]) * 0.5).radius();
        if (rm < 0.1 || rm > 0.9) return std::nullopt;
      }
    }
    return gp;
  }

  static void shift_node(GeodesicPath& gp, int k, double delta) {
    const int node = 1 + k / 2;
    if (k % 2 == 0) gp.nodes[node].x += delta;
    else gp.nodes[node].y += delta;
  }

  /// max |g - g_fd| / max |g| with central differences of E.
  static double gradient_error(const GeodesicPath& gp) {
    const auto g = energy_gradient(gp);
    const double h = 1e-6;
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      GeodesicPath plus = gp, minus = gp;
      shift_node(plus, static_cast<int>(k), h);
      shift_node(minus, static_cast<int>(k), -h);
      const double fd = (energy(plus) - energy(minus)) / (2.0 * h);
      err = std::max(err, std::abs(fd - g[k]));
      scale = std::max(scale, std::abs(g[k]));
    }
    return err / scale;
  }

  /// max |H - H_fd| / max |H| with central differences of the gradient.
  static double hessian_error(const GeodesicPath& gp) {
    const Eigen::MatrixXd hess = assemble_hessian(gp).dense();
    const double h = 1e-6;
    double err = 0.0;
    for (int k = 0; k < hess.cols(); ++k) {
      GeodesicPath plus = gp, minus = gp;
      shift_node(plus, k, h);
      shift_node(minus, k, -h);
      const auto gp_plus = energy_gradient(plus), gp_minus = energy_gradient(minus);
      for (int row = 0; row < hess.rows(); ++row) {
        err = std::max(err, std::abs((gp_plus[row] - gp_minus[row]) / (2.0 * h) - hess(row, k)));
      }
    }
    return err / hess.cwiseAbs().maxCoeff();
  }

  const std::vector<acceptance::AnalyzedArc>& analyzed() {
    if (analyzed_) return *analyzed_;
    std::vector<acceptance::AnalyzedArc> items;
    for (const auto& s : acceptance::sub_grid(opt_.grid_size)) {
      for (const auto& a : enumerate_arcs(s).arcs) items.push_back({s, a, {}});
    }
    MinimalityOptions mo;
    mo.intervals = opt_.mesh;
    auto reports = parallel_map(items.size(), opt_.jobs,
                                [&](std::size_t k) { return analyze_arc(items[k].arc, items[k].scenario, mo); });
    for (std::size_t k = 0; k < items.size(); ++k) items[k].report = std::move(reports[k]);
    analyzed_ = std::move(items);
    return *analyzed_;
  }

 private:
  AcceptanceOptions opt_;
  std::optional<std::vector<acceptance::AnalyzedArc>> analyzed_;
};

}  // namespace kepler_arcs
