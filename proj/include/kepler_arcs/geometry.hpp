// Conic geometry of Keplerian ellipses in the normalized frame.
//
// Normalization: energy h = -1, so every bound orbit lies on an ellipse with
// one focus at the origin and major axis of length 1 (semi-major axis 1/2).
// Such an ellipse is described by its eccentricity e and the angle phi' in
//
//     r(phi) = 0.5 (1 - e^2) / (1 + e cos(phi + phi')).
//
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace kepler_arcs {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Thrown when a geometric precondition (point on conic, distinct conics, ...)
/// does not hold.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) {
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

/// a - b reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = wrap_angle(a - b);
  return d > pi ? d - two_pi : d;
}

inline bool same_angle(double a, double b, double tol = 1e-10) {
  return std::abs(angle_diff(a, b)) <= tol;
}

/// A point (or vector) of the plane. Cartesian storage, polar accessors.
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  static PlanePoint from_polar(double r, double phi) {
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  double radius() const { return std::hypot(x, y); }
  /// Polar angle in [0, 2pi).
  double angle() const { return wrap_angle(std::atan2(y, x)); }

  PlanePoint operator+(PlanePoint o) const { return {x + o.x, y + o.y}; }
  PlanePoint operator-(PlanePoint o) const { return {x - o.x, y - o.y}; }
  PlanePoint operator-() const { return {-x, -y}; }
  PlanePoint operator*(double s) const { return {s * x, s * y}; }
  PlanePoint operator/(double s) const { return {x / s, y / s}; }
  PlanePoint& operator+=(PlanePoint o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  PlanePoint& operator-=(PlanePoint o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  bool operator==(const PlanePoint&) const = default;
};

inline PlanePoint operator*(double s, PlanePoint p) { return p * s; }
inline double dot(PlanePoint a, PlanePoint b) { return a.x * b.x + a.y * b.y; }
inline double cross(PlanePoint a, PlanePoint b) { return a.x * b.y - a.y * b.x; }
inline double norm(PlanePoint a) { return std::hypot(a.x, a.y); }
inline double distance(PlanePoint a, PlanePoint b) { return norm(a - b); }
/// Counterclockwise rotation by a quarter turn.
inline PlanePoint perp(PlanePoint a) { return {-a.y, a.x}; }
inline PlanePoint rotate(PlanePoint a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Twice the signed area of the triangle (a, b, c).
inline double triangle_area2(PlanePoint a, PlanePoint b, PlanePoint c) {
  return cross(b - a, c - a);
}

/// The normalized Hill's region {0 < |x| < 1}.
struct HillRegion {
  static bool contains(PlanePoint p) {
    const double r = p.radius();
    return r > 0.0 && r < 1.0;
  }
};

class KeplerEllipse {
 public:
  KeplerEllipse() = default;
  KeplerEllipse(double eccentricity, double phi_prime)
      : e_(eccentricity), phi_prime_(wrap_angle(phi_prime)) {
    if (!(e_ >= 0.0 && e_ < 1.0)) {
      throw GeometryError("eccentricity must lie in [0, 1), got " + std::to_string(e_));
    }
  }

  double eccentricity() const { return e_; }
  double phi_prime() const { return phi_prime_; }
  bool is_circle() const { return e_ == 0.0; }

  double semi_latus_rectum() const { return 0.5 * (1.0 - e_ * e_); }
  double perihelion_radius() const { return 0.5 * (1.0 - e_); }
  double aphelion_radius() const { return 0.5 * (1.0 + e_); }

  /// Unit vector toward perihelion, at polar angle -phi'.
  PlanePoint perihelion_direction() const {
    return {std::cos(phi_prime_), -std::sin(phi_prime_)};
  }

  bool operator==(const KeplerEllipse&) const = default;

 private:
  double e_ = 0.0;
  double phi_prime_ = 0.0;
};

inline double polar_radius(const KeplerEllipse& ell, double phi) {
  const double e = ell.eccentricity();
  return ell.semi_latus_rectum() / (1.0 + e * std::cos(phi + ell.phi_prime()));
}

inline PlanePoint point_at_angle(const KeplerEllipse& ell, double phi) {
  return PlanePoint::from_polar(polar_radius(ell, phi), phi);
}

inline bool contains_point(const KeplerEllipse& ell, PlanePoint p, double tol = 1e-10) {
  if (p.radius() == 0.0) throw GeometryError("contains_point: the origin is a focus, not a point of the conic");
  return std::abs(p.radius() - polar_radius(ell, p.angle())) <= tol;
}

/// The focus other than the origin. Lies on the aphelion side at distance e.
/// For a circle this is the origin itself.
inline PlanePoint second_focus(const KeplerEllipse& ell) {
  return ell.perihelion_direction() * (-ell.eccentricity());
}

/// Intersections of the line through p and f with the ellipse. The first
/// entry is p itself; a second entry is present unless the line is tangent.
inline std::vector<PlanePoint> line_conic_intersection(PlanePoint p, PlanePoint f, const KeplerEllipse& ell,
                                                       double on_tol = 1e-9) {
  if (!contains_point(ell, p, on_tol)) throw GeometryError("line_conic_intersection: p is not on the ellipse");
  const PlanePoint d = f - p;
  if (norm(d) == 0.0) throw GeometryError("line_conic_intersection: line is undefined (f == p)");

  // On the conic |x| = l - e <x, w>, w the perihelion direction. Along
  // x = p + t d this squares to a t^2 + b t + c = 0 (no spurious branch for e < 1).
  const double e = ell.eccentricity();
  const PlanePoint w = ell.perihelion_direction();
  const double k0 = ell.semi_latus_rectum() - e * dot(p, w);
  const double k1 = e * dot(d, w);
  const double a = dot(d, d) - k1 * k1;
  const double b = 2.0 * (dot(p, d) + k0 * k1);
  const double c = dot(p, p) - k0 * k0;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 && disc > -1e-12 * b * b) disc = 0.0;
  if (disc < 0.0) throw GeometryError("line_conic_intersection: no real intersection");

  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double t1 = (q != 0.0) ? c / q : 0.0;  // root near 0 (the point p)
  double t2 = (a != 0.0) ? q / a : 0.0;
  if (std::abs(t1) > std::abs(t2)) std::swap(t1, t2);

  std::vector<PlanePoint> out{p};
  if (std::abs(t2 - t1) * norm(d) > 1e-12) out.push_back(p + d * t2);
  return out;
}

/// Antipodal point of p: the second intersection of the ellipse with the
/// focal chord through p and the second focus. For a circle, -p.
inline PlanePoint antipodal_point(const KeplerEllipse& ell, PlanePoint p, double on_tol = 1e-9) {
  if (!contains_point(ell, p, on_tol)) throw GeometryError("antipodal_point: p is not on the ellipse");
  if (ell.is_circle()) return -p;
  // Focal chord through f: 1/rho1 + 1/rho2 = 2/l, distances measured from f.
  const double l = ell.semi_latus_rectum();
  const PlanePoint f = second_focus(ell);
  const PlanePoint u = f - p;
  const double rho1 = norm(u);
  const double rho2 = l * rho1 / (2.0 * rho1 - l);
  return f + u * (rho2 / rho1);
}

/// All common points of two ellipses sharing the focus at the origin and the
/// major axis length. The plane is rotated so that ell1 reads
/// r = l1 / (1 - e1 cos psi) and ell2 reads r = l2 / (1 - e2 cos(psi + phi_n));
/// the common angles solve A cos psi + B sin psi + C = 0 with
///   A = e1 (1 - e2^2) - e2 (1 - e1^2) cos phi_n,
///   B = e2 (1 - e1^2) sin phi_n,
///   C = e2^2 - e1^2.
/// Returns 0, 1 (tangency) or 2 points sorted by polar angle.
inline std::vector<PlanePoint> confocal_intersection(const KeplerEllipse& ell1, const KeplerEllipse& ell2) {
  const double e1 = ell1.eccentricity(), e2 = ell2.eccentricity();
  const bool same_shape = std::abs(e1 - e2) <= 1e-15;
  if (same_shape && (e1 == 0.0 || same_angle(ell1.phi_prime(), ell2.phi_prime(), 1e-15))) {
    throw GeometryError("confocal_intersection: coincident ellipses");
  }
  const double phi_n = ell2.phi_prime() - ell1.phi_prime();
  const double A = e1 * (1.0 - e2 * e2) - e2 * (1.0 - e1 * e1) * std::cos(phi_n);
  const double B = e2 * (1.0 - e1 * e1) * std::sin(phi_n);
  const double C = e2 * e2 - e1 * e1;
  const double n2 = A * A + B * B;
  if (n2 == 0.0) return {};
  double D = n2 - C * C;
  if (D < 0.0 && D > -1e-12 * n2) D = 0.0;
  if (D < 0.0) return {};
  const double sq = std::sqrt(D);

  auto to_point = [&](double c, double s) {
    const double psi = std::atan2(s, c);
    const double phi = psi - ell1.phi_prime() + pi;
    return point_at_angle(ell1, wrap_angle(phi));
  };
  std::vector<PlanePoint> out;
  out.push_back(to_point((-A * C + B * sq) / n2, (-B * C - A * sq) / n2));
  if (sq > 1e-12 * std::sqrt(n2)) out.push_back(to_point((-A * C - B * sq) / n2, (-B * C + A * sq) / n2));
  std::sort(out.begin(), out.end(), [](PlanePoint a, PlanePoint b) { return a.angle() < b.angle(); });
  return out;
}

}  // namespace kepler_arcs
