#include <random>

#include <gtest/gtest.h>

#include "kepler_arcs/bifurcation.hpp"
#include "kepler_arcs/config.hpp"
#include "oracles.hpp"

using namespace kepler_arcs;

namespace {

PerturbedFamily family(double r0, double phi0, int branch, int members = 20) {
  FamilySpec spec;
  spec.r0 = r0;
  spec.phi0 = phi0;
  spec.branch = branch;
  const auto [ell, p] = spec.resolve();
  ScheduleOptions so;
  so.members = members;
  return build_family(ell, p, geometric_schedule(so));
}

}  // namespace

TEST(Frame, RoundTripAndNormalForm) {
  const KeplerEllipse ell(0.55, 2.3);
  for (double a : {0.3, 1.9, 4.0}) {
    const PlanePoint p = point_at_angle(ell, a);
    const FrameMap fm = make_frame(ell, p);
    const PlanePoint y = fm.to_frame(p);
    EXPECT_LE(y.y, 1e-15);
    EXPECT_LT(distance(fm.from_frame(y), p), 1e-15);
    const KeplerEllipse in_frame = fm.ellipse_to_frame(ell);
    EXPECT_NEAR(second_focus(in_frame).x, ell.eccentricity(), 1e-14);
    EXPECT_NEAR(second_focus(in_frame).y, 0.0, 1e-14);
    EXPECT_TRUE(contains_point(in_frame, y, 1e-13));
    const KeplerEllipse back = fm.ellipse_from_frame(in_frame);
    EXPECT_NEAR(back.eccentricity(), ell.eccentricity(), 1e-15);
    EXPECT_TRUE(same_angle(back.phi_prime(), ell.phi_prime(), 1e-13));
  }
}

TEST(Schedule, GeometricDecay) {
  ScheduleOptions so;
  so.members = 5;
  so.first = 0.2;
  so.ratio = 0.5;
  const auto s = geometric_schedule(so);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_DOUBLE_EQ(s[0], 0.2);
  EXPECT_DOUBLE_EQ(s[4], 0.2 / 16);
}

TEST(Family, MembersPassThroughAnchor) {
  const PerturbedFamily fam = family(0.4, 1.0, +1);
  ASSERT_EQ(fam.members.size(), 20u);
  for (const auto& m : fam.members) {
    EXPECT_LT(m.membership_residual, 1e-13);
    EXPECT_TRUE(contains_point(m.ellipse, fam.anchor, 1e-12));
  }
}

TEST(Intersections, LieOnBothEllipsesAndMatchRadialScan) {
  const PerturbedFamily fam = family(0.35, 2.0, +1, 8);
  const auto pts = track_intersections(fam);
  ASSERT_EQ(pts.size(), fam.members.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& m = fam.members[i].ellipse;
    EXPECT_TRUE(contains_point(fam.base, pts[i].point, 1e-12));
    EXPECT_TRUE(contains_point(m, pts[i].point, 1e-12));
    const auto roots = oracles::scan_roots(
        [&](double phi) { return polar_radius(fam.base, phi) - polar_radius(m, phi); }, 0.0, two_pi, 40000);
    double best = 1e300;
    for (double r : roots) best = std::min(best, distance(point_at_angle(fam.base, r), pts[i].point));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(Intersections, ConvergeToAntipodeWithOrderOne) {
  const PerturbedFamily fam = family(0.4, 1.0, +1);
  const auto pts = track_intersections(fam);
  const BifurcationLimit lim = limit_point(fam);
  const ConvergenceSummary cs = convergence(pts, lim);
  EXPECT_TRUE(cs.monotone);
  EXPECT_GE(cs.order, 0.9);
  EXPECT_LT(cs.psi_error, 1e-8);
  EXPECT_LT(cs.r_error, 1e-8);
}

TEST(Limit, ClosedFormEqualsGeometricAntipode) {
  // r0 = 0.4, phi0 = pi/3 on the + branch: e = 0.2 + sqrt(0.24).
  const PerturbedFamily fam = family(0.4, pi / 3, +1);
  EXPECT_NEAR(fam.base.eccentricity(), 0.689898, 1e-6);
  const BifurcationLimit lim = limit_point(fam);
  EXPECT_LT(lim.antipode_gap, 1e-10);
  const PlanePoint f = second_focus(fam.base);
  const auto ref = oracles::antipode_by_scan({fam.anchor.x, fam.anchor.y}, {f.x, f.y});
  EXPECT_NEAR(lim.point.x, ref.x, 1e-10);
  EXPECT_NEAR(lim.point.y, ref.y, 1e-10);
}

TEST(Limit, SlopeIdentityAndCollinearityOnRandomBases) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const FamilySpec spec = random_family(rng);
    const PerturbedFamily fam = family(spec.r0, spec.phi0, spec.branch, 3);
    const BifurcationLimit lim = limit_point(fam);
    EXPECT_NEAR(lim.m, lim.m_star, 1e-10);
    EXPECT_NEAR(lim.m, lim.m_chord, 1e-10);
    EXPECT_LT(lim.collinearity, 1e-10);
    EXPECT_LT(lim.antipode_gap, 1e-10);
  }
}

TEST(Limit, CircleIsRejected) {
  ScheduleOptions so;
  so.members = 3;
  const KeplerEllipse circle(0.0, 0.0);
  const PerturbedFamily fam = build_family(circle, point_at_angle(circle, 1.0), geometric_schedule(so));
  EXPECT_TRUE(fam.circle);
  EXPECT_THROW(limit_point(fam), BifurcationError);
}

TEST(Limit, CircleFamilyApproachesOppositePoint) {
  ScheduleOptions so;
  so.members = 12;
  so.first = 0.3;
  const KeplerEllipse circle(0.0, 0.0);
  const PlanePoint p = point_at_angle(circle, -1.0);
  const auto pts = track_intersections(build_family(circle, p, geometric_schedule(so)));
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].distance_to_antipode, pts[i - 1].distance_to_antipode);
  EXPECT_LT(distance(pts.back().point, -p), 1e-3);
}

TEST(Extrapolation, RichardsonAndOrderFit) {
  std::vector<double> seq, h, y;
  for (int n = 0; n < 8; ++n) {
    const double hn = 0.1 * std::pow(0.5, n);
    seq.push_back(1.0 + 2.0 * hn + 3.0 * hn * hn);
    h.push_back(hn);
    y.push_back(0.7 * std::pow(hn, 1.5));
  }
  EXPECT_NEAR(richardson(seq), 1.0, 1e-14);
  EXPECT_NEAR(fit_order(h, y), 1.5, 1e-12);
}

TEST(Shooting, AccumulatesAtTheConjugateParameter) {
  const PerturbedFamily fam = family(0.4, 1.0, +1, 24);
  const ShootingRecord sh = shooting_bifurcation(fam, track_intersections(fam));
  EXPECT_TRUE(sh.unique_accumulation);
  EXPECT_NEAR(sh.s_star, sh.s_star_jacobi, 1e-6);
  EXPECT_LT(sh.final_parameter_gap(), 1e-6);
  EXPECT_LT(sh.final_velocity_gap(), 1e-6);
  EXPECT_NEAR(sh.speed_star, pi, 1e-10);
  int shot = 0;
  for (const auto& m : sh.members) {
    if (!m.shot) continue;
    ++shot;
    EXPECT_LT(m.hit_residual, 1e-8);
    EXPECT_LT(m.direction_gap, 1e-7);
  }
  EXPECT_GT(shot, 5);
  for (std::size_t i = 1; i < sh.members.size(); ++i) EXPECT_LT(sh.members[i].velocity_gap, sh.members[i - 1].velocity_gap);
}

TEST(Shooting, GeodesicFlowKeepsUnitMaupertuisSpeed) {
  const PlanePoint p{0.3, -0.2};
  const ShotResult r = shoot(p, 1.0, p.angle() + 2.0);
  const PlanePoint x{r.state[0], r.state[1]}, v{r.state[2], r.state[3]};
  EXPECT_NEAR(norm(v) * std::sqrt(KeplerWeight::value(x)), 1.0, 1e-10);
}
