#include <random>

#include <gtest/gtest.h>

#include "kepler_arcs/acceptance.hpp"
#include "kepler_arcs/variational.hpp"
#include "oracles.hpp"

using namespace kepler_arcs;

namespace {

GeodesicPath random_path(unsigned seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    if (auto gp = AcceptanceSuite::random_path(rng)) return *gp;
  }
}

std::vector<double> flatten(const GeodesicPath& gp) {
  std::vector<double> x;
  for (int i = 1; i < gp.intervals(); ++i) {
    x.push_back(gp.nodes[i].x);
    x.push_back(gp.nodes[i].y);
  }
  return x;
}

GeodesicPath with_interior(GeodesicPath gp, const std::vector<double>& x) {
  for (int i = 1; i < gp.intervals(); ++i) gp.nodes[i] = {x[2 * (i - 1)], x[2 * (i - 1) + 1]};
  return gp;
}

KeplerArc circle_arc(double start, double span) {
  KeplerArc arc;
  arc.ellipse = KeplerEllipse(0.0, 0.0);
  arc.start_angle = start;
  arc.span = span;
  arc.orientation = span > 0 ? 1 : -1;
  return arc;
}

}  // namespace

TEST(Energy, FlatMetricStraightSegment) {
  GeodesicPath gp;
  const PlanePoint a{0.1, 0.2}, b{0.5, -0.3};
  for (int i = 0; i <= 10; ++i) gp.nodes.push_back(a + (b - a) * (i / 10.0));
  EXPECT_NEAR(energy<ConstantWeight>(gp), dot(b - a, b - a), 1e-14);
  EXPECT_LT(oracles::max_abs(energy_gradient<ConstantWeight>(gp)), 1e-13);
  const MorseIndex mi = morse_index(assemble_hessian<ConstantWeight>(gp));
  EXPECT_EQ(mi.index, 0);
  EXPECT_GT(mi.smallest_eigenvalue, 0.0);
}

TEST(Energy, GradientMatchesFiniteDifferences) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const GeodesicPath gp = random_path(seed);
    const auto g = energy_gradient(gp);
    const auto fd = oracles::fd_gradient([&](const std::vector<double>& x) { return energy(with_interior(gp, x)); },
                                         flatten(gp));
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = g[i] - fd[i];
    EXPECT_LT(oracles::max_abs(diff), 1e-6 * oracles::max_abs(g));
  }
}

TEST(Energy, HessianMatchesFiniteDifferencesOfGradient) {
  for (unsigned seed = 100; seed < 110; ++seed) {
    const GeodesicPath gp = random_path(seed);
    const Eigen::MatrixXd h = assemble_hessian(gp).dense();
    const auto x = flatten(gp);
    for (int k = 0; k < h.cols(); ++k) {
      const auto col = oracles::fd_gradient(
          [&](const std::vector<double>& y) { return energy_gradient(with_interior(gp, y))[k]; }, x);
      for (int r = 0; r < h.rows(); ++r) EXPECT_NEAR(h(r, k), col[r], 1e-6 * h.cwiseAbs().maxCoeff());
    }
  }
}

TEST(Energy, OutsideHillRegionThrows) {
  GeodesicPath gp;
  gp.nodes = {{0.2, 0.0}, {1.2, 0.0}, {0.3, 0.1}};
  EXPECT_THROW(energy(gp), HillRegionError);
}

TEST(SecondVariation, InertiaMatchesDenseEigenvalues) {
  for (double R : {0.3, 0.7}) {
    const Scenario s = make_scenario(R, 0.25);
    for (const auto& arc : enumerate_arcs(s).arcs) {
      const GeodesicSampler g(time_parameterize(arc));
      const SecondVariation sv = assemble_hessian(sample_path(g, 120));
      const Eigen::VectorXd ev = oracles::eigenvalues(sv.dense());
      for (double shift : {-1.0, 0.0, 0.5, 3.0}) {
        int below = 0;
        for (int i = 0; i < ev.size(); ++i) below += ev(i) < shift;
        EXPECT_EQ(sv.count_below(shift), below);
      }
      EXPECT_NEAR(sv.smallest_eigenvalue(), ev(0), 1e-9 * sv.norm());
      EXPECT_GE(sv.norm(), ev.cwiseAbs().maxCoeff());
    }
  }
}

TEST(SecondVariation, ApplyAgreesWithDenseProduct) {
  const GeodesicPath gp = random_path(7);
  const SecondVariation sv = assemble_hessian(gp);
  std::vector<double> v(sv.dim());
  for (int i = 0; i < sv.dim(); ++i) v[i] = std::sin(1.0 + i);
  const auto av = sv.apply(v);
  const Eigen::VectorXd ref = sv.dense() * Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  for (int i = 0; i < sv.dim(); ++i) EXPECT_NEAR(av[i], ref(i), 1e-10 * sv.norm());
}

TEST(Morse, IndexZeroForMinimizersAndOneOtherwise) {
  for (double R : {0.2, 0.4, 0.6, 0.85}) {
    const Scenario s = make_scenario(R, 0.12);
    for (const auto& arc : enumerate_arcs(s).arcs) {
      const MorseIndex mi = morse_index_refined(GeodesicSampler(time_parameterize(arc)));
      EXPECT_EQ(mi.index, classify_analytic(arc, s) == Verdict::minimizer ? 0 : 1) << arc.label.str();
    }
  }
}

TEST(Jacobi, CircleConjugatePointAfterHalfTurn) {
  for (double span : {1.5 * pi, -1.2 * pi, 1.9 * pi}) {
    const GeodesicSampler g(time_parameterize(circle_arc(0.4, span)));
    const auto cps = jacobi_conjugate_points(g);
    ASSERT_EQ(cps.size(), 1u);
    EXPECT_NEAR(cps[0].parameter, pi / std::abs(span), 1e-8);
    EXPECT_EQ(cps[0].multiplicity, 1);
    EXPECT_LT(distance(cps[0].position, -PlanePoint::from_polar(0.5, 0.4)), 1e-8);
  }
}

TEST(Jacobi, NoConjugatePointBeforeHalfTurn) {
  EXPECT_TRUE(jacobi_conjugate_points(GeodesicSampler(time_parameterize(circle_arc(0.0, 0.9 * pi)))).empty());
}

TEST(Jacobi, FullEllipseConjugatePointIsAntipode) {
  for (double e : {0.2, 0.6, 0.85}) {
    const KeplerEllipse ell(e, 0.9);
    const PlanePoint p = point_at_angle(ell, 2.1);
    const GeodesicSampler g(time_parameterize(full_orbit_arc(ell, p, +1)));
    JacobiOptions opt;
    opt.s_end = 0.999;
    const auto cps = jacobi_conjugate_points(g, opt);
    ASSERT_FALSE(cps.empty());
    EXPECT_LT(distance(cps[0].position, antipodal_point(ell, p)), 1e-7);
  }
}

TEST(Minimality, ThreeTestsAgreeOnRandomScenarios) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ur(0.05, 0.95), ua(0.05, pi - 0.05);
  int analyzed = 0;
  while (analyzed < 40) {
    const double R = ur(rng), a = ua(rng);
    if (std::abs(R - 0.5) < 1e-3) continue;
    const Scenario s = make_scenario(R, a);
    for (const auto& arc : enumerate_arcs(s).arcs) {
      const MinimalityReport rep = analyze_arc(arc, s);
      EXPECT_TRUE(rep.all_agree()) << "R = " << R << " phi0 = " << a << " " << rep.label;
      ++analyzed;
    }
  }
}

TEST(Minimality, DegenerateSemicirclesAreUndecidedWithEndpointConjugate) {
  const Scenario s = make_scenario(0.5, 0.5 * pi);
  for (const auto& arc : enumerate_arcs(s).arcs) {
    const MinimalityReport rep = analyze_arc(arc, s);
    EXPECT_EQ(rep.analytic, Verdict::undecided_degenerate);
    EXPECT_TRUE(rep.endpoint_conjugate);
    EXPECT_EQ(rep.interior_multiplicity(), 0);
  }
}

TEST(MaupertuisJ, GradientMatchesFiniteDifferences) {
  const GeodesicPath gp = random_path(21);
  const auto g = maupertuis_J_gradient(gp);
  const auto fd = oracles::fd_gradient(
      [&](const std::vector<double>& x) { return maupertuis_J(with_interior(gp, x)); }, flatten(gp));
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], fd[i], 1e-6 * oracles::max_abs(g));
}

TEST(MaupertuisJ, AffineTimePathIsCriticalInTheLimit) {
  const KeplerArc arc = enumerate_arcs(make_scenario(0.3, 1.0)).arcs[0];
  const TimedArc ta = time_parameterize(arc);
  auto norm_at = [&](int n) {
    double sq = 0.0;
    for (double v : maupertuis_J_gradient(affine_time_path(ta, n))) sq += v * v;
    return std::sqrt(sq);
  };
  const double g1 = norm_at(200), g2 = norm_at(400);
  EXPECT_LT(g2, 1e-6 * 400);
  EXPECT_GT(g1 / g2, 4.0);
}

TEST(Periodic, ClosedEllipseHasNegativeDirection) {
  for (double e : {0.0, 0.5}) {
    const KeplerEllipse ell(e, 0.3);
    const GeodesicSampler g(time_parameterize(full_orbit_arc(ell, point_at_angle(ell, 1.0), -1)));
    GeodesicPath gp = sample_path(g, 150);
    gp.nodes.pop_back();
    const Eigen::MatrixXd a = assemble_periodic_hessian(gp.nodes);
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
    EXPECT_LT(oracles::eigenvalues(a)(0), -1e-8 * a.cwiseAbs().rowwise().sum().maxCoeff());
  }
}
