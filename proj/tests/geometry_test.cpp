#include <random>

#include <gtest/gtest.h>

#include "kepler_arcs/geometry.hpp"
#include "oracles.hpp"

using namespace kepler_arcs;

namespace {

std::vector<KeplerEllipse> random_ellipses(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ue(0.0, 0.97), ua(-pi, pi);
  std::vector<KeplerEllipse> out;
  for (int i = 0; i < n; ++i) out.emplace_back(ue(rng), ua(rng));
  return out;
}

}  // namespace

TEST(Angles, WrapIntoHalfOpenRange) {
  for (double a : {-7.0, -pi, 0.0, 1.0, pi, 2 * pi, 13.0}) {
    const double w = wrap_angle(a);
    EXPECT_GE(w, 0.0);
    EXPECT_LT(w, two_pi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-12);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-12);
  }
}

TEST(Ellipse, RejectsEccentricityOutsideUnitInterval) {
  EXPECT_THROW(KeplerEllipse(1.0, 0.0), GeometryError);
  EXPECT_THROW(KeplerEllipse(-0.1, 0.0), GeometryError);
  EXPECT_NO_THROW(KeplerEllipse(0.0, 0.0));
}

TEST(Ellipse, PointsSatisfyFocalDistanceSum) {
  for (const auto& ell : random_ellipses(50, 1)) {
    const PlanePoint f = second_focus(ell);
    EXPECT_NEAR(norm(f), ell.eccentricity(), 1e-15);
    for (double phi = 0.0; phi < two_pi; phi += 0.37) {
      const PlanePoint x = point_at_angle(ell, phi);
      EXPECT_NEAR(norm(x) + distance(x, f), 1.0, 1e-13);
      EXPECT_TRUE(contains_point(ell, x));
      EXPECT_TRUE(HillRegion::contains(x));
    }
  }
}

TEST(Ellipse, PerihelionAndAphelionRadii) {
  const KeplerEllipse ell(0.6, 1.1);
  EXPECT_NEAR(polar_radius(ell, -1.1), ell.perihelion_radius(), 1e-15);
  EXPECT_NEAR(polar_radius(ell, pi - 1.1), ell.aphelion_radius(), 1e-15);
  const PlanePoint w = ell.perihelion_direction();
  EXPECT_NEAR(w.angle(), wrap_angle(-1.1), 1e-15);
}

TEST(Antipode, MatchesFocalChordScan) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ua(0.0, two_pi);
  for (const auto& ell : random_ellipses(60, 3)) {
    if (ell.eccentricity() < 1e-3) continue;
    const PlanePoint p = point_at_angle(ell, ua(rng));
    const PlanePoint f = second_focus(ell);
    const auto ref = oracles::antipode_by_scan({p.x, p.y}, {f.x, f.y});
    const PlanePoint pf = antipodal_point(ell, p);
    EXPECT_NEAR(pf.x, ref.x, 1e-11);
    EXPECT_NEAR(pf.y, ref.y, 1e-11);
  }
}

TEST(Antipode, IsAnInvolutionAndCollinearWithFocus) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(0.0, two_pi);
  for (const auto& ell : random_ellipses(60, 5)) {
    const PlanePoint p = point_at_angle(ell, ua(rng));
    const PlanePoint pf = antipodal_point(ell, p);
    EXPECT_TRUE(contains_point(ell, pf, 1e-12));
    EXPECT_LT(distance(antipodal_point(ell, pf), p), 1e-12);
    EXPECT_LT(std::abs(triangle_area2(p, second_focus(ell), pf)), 1e-13);
  }
}

TEST(Antipode, CircleGivesOppositePoint) {
  const KeplerEllipse circle(0.0, 0.0);
  const PlanePoint p = point_at_angle(circle, 0.8);
  EXPECT_LT(distance(antipodal_point(circle, p), -p), 1e-15);
}

TEST(Antipode, RejectsPointOffTheEllipse) {
  EXPECT_THROW(antipodal_point(KeplerEllipse(0.3, 0.0), {0.1, 0.1}), GeometryError);
}

TEST(LineConic, FirstEntryIsPAndSecondLiesOnEllipse) {
  const KeplerEllipse ell(0.5, 0.4);
  const PlanePoint p = point_at_angle(ell, 2.0);
  const auto pts = line_conic_intersection(p, {0.1, -0.05}, ell);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0], p);
  EXPECT_TRUE(contains_point(ell, pts[1], 1e-12));
}

TEST(Confocal, CommonPointsMatchRadialScan) {
  const auto ells = random_ellipses(40, 6);
  for (std::size_t i = 0; i + 1 < ells.size(); i += 2) {
    const auto& a = ells[i];
    const auto& b = ells[i + 1];
    const auto pts = confocal_intersection(a, b);
    const auto roots = oracles::scan_roots([&](double phi) { return polar_radius(a, phi) - polar_radius(b, phi); },
                                           0.0, two_pi, 20000);
    EXPECT_EQ(pts.size(), roots.size());
    for (const auto& x : pts) {
      EXPECT_TRUE(contains_point(a, x, 1e-12));
      EXPECT_TRUE(contains_point(b, x, 1e-12));
    }
  }
}

TEST(Confocal, CoincidentEllipsesThrow) {
  EXPECT_THROW(confocal_intersection(KeplerEllipse(0.3, 1.0), KeplerEllipse(0.3, 1.0)), GeometryError);
}
