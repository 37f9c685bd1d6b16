// Perturbed confocal ellipse families through a common point p, their
// intersection with the base ellipse, the limit of the intersection points,
// and the geodesic-shooting view of the limit as a bifurcation point.
//
// Working frame: the base ellipse reads r = l / (1 - e cos phi) (second
// focus on the positive x-axis) and p = r0 e^{-i phi0}, phi0 in [0, pi].
// Family members read r = l_n / (1 - e_n cos(phi + phi_n)).
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kepler_arcs/dynamics.hpp"
#include "kepler_arcs/geometry.hpp"
#include "kepler_arcs/ode.hpp"
#include "kepler_arcs/variational.hpp"
#include "kepler_arcs/weight.hpp"

namespace kepler_arcs {

class BifurcationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rigid motion taking the original plane to the working frame:
/// rotate by `rotation`, then reflect y if `reflect`.
struct FrameMap {
  double rotation = 0.0;
  bool reflect = false;

  PlanePoint to_frame(PlanePoint x) const {
    PlanePoint y = kepler_arcs::rotate(x, rotation);
    if (reflect) y.y = -y.y;
    return y;
  }
  PlanePoint from_frame(PlanePoint y) const {
    if (reflect) y.y = -y.y;
    return kepler_arcs::rotate(y, -rotation);
  }
  KeplerEllipse ellipse_to_frame(const KeplerEllipse& ell) const {
    double pp = ell.phi_prime() - rotation;
    if (reflect) pp = -pp;
    return {ell.eccentricity(), pp};
  }
  KeplerEllipse ellipse_from_frame(const KeplerEllipse& ell) const {
    double pp = ell.phi_prime();
    if (reflect) pp = -pp;
    return {ell.eccentricity(), pp + rotation};
  }
};

/// Frame in which `ell` has its second focus on the positive x-axis and p
/// lies in the closed lower half-plane. For a circle only the reflection is used.
inline FrameMap make_frame(const KeplerEllipse& ell, PlanePoint p) {
  FrameMap fm;
  fm.rotation = ell.is_circle() ? 0.0 : ell.phi_prime() - pi;
  const PlanePoint y = kepler_arcs::rotate(p, fm.rotation);
  fm.reflect = y.y > 0.0;
  return fm;
}

struct FamilyMember {
  int n = 0;
  double phi_n = 0.0;
  double e_n = 0.0;
  KeplerEllipse frame_ellipse;  // (e_n, pi + phi_n)
  KeplerEllipse ellipse;        // same member in the original plane
  double membership_residual = 0.0;
};

struct PerturbedFamily {
  KeplerEllipse base;
  PlanePoint anchor;
  FrameMap frame;
  double r0 = 0.0;
  double phi0 = 0.0;
  bool circle = false;
  int branch = +1;          // sign of e - r0 cos phi0 (ellipse base), or of phi_n - phi0 (circle base)
  std::vector<FamilyMember> members;
  std::vector<std::string> warnings;
};

struct ScheduleOptions {
  int members = 20;
  double first = 0.1;   // phi_1 for an ellipse base; e_1 for a circle base
  double ratio = 0.5;   // geometric schedule x_n = first * ratio^(n-1)
  int circle_branch = +1;
};

inline std::vector<double> geometric_schedule(const ScheduleOptions& opt) {
  std::vector<double> out;
  double x = opt.first;
  for (int n = 0; n < opt.members; ++n, x *= opt.ratio) out.push_back(x);
  return out;
}

namespace detail {

/// e_n - e for phi_n in the ellipse-base family, free of cancellation.
inline double eccentricity_shift(double r0, double phi0, double phi_n, int branch) {
  const double c0 = std::cos(phi0), cn = std::cos(phi_n - phi0);
  const double dcos = -2.0 * std::sin(0.5 * phi_n) * std::sin(0.5 * phi_n - phi0);  // cn - c0
  const double delta0 = r0 * r0 * c0 * c0 + 1.0 - 2.0 * r0;
  const double delta_n = r0 * r0 * cn * cn + 1.0 - 2.0 * r0;
  const double ddelta = r0 * r0 * dcos * (cn + c0);
  const double droot = ddelta / (std::sqrt(std::max(delta_n, 0.0)) + std::sqrt(std::max(delta0, 0.0)));
  return r0 * dcos + branch * droot;
}

}  // namespace detail

/// Family of ellipses through p converging to `ell`. For an ellipse base the
/// schedule lists phi_n; for a circle base it lists e_n, with
/// phi_n = phi0 + circle_branch * arccos(e_n).
inline PerturbedFamily build_family(const KeplerEllipse& ell, PlanePoint p, const std::vector<double>& schedule,
                                    int circle_branch = +1) {
  if (!contains_point(ell, p, 1e-9)) throw BifurcationError("build_family: p is not on the base ellipse");
  PerturbedFamily fam;
  fam.base = ell;
  fam.anchor = p;
  fam.frame = make_frame(ell, p);
  fam.circle = ell.is_circle();
  const PlanePoint pf = fam.frame.to_frame(p);
  fam.r0 = pf.radius();
  fam.phi0 = std::clamp(-std::atan2(pf.y, pf.x), 0.0, pi);
  const double e = ell.eccentricity();
  const double c0 = std::cos(fam.phi0);
  const double delta = fam.r0 * fam.r0 * c0 * c0 + 1.0 - 2.0 * fam.r0;

  if (fam.circle) {
    fam.branch = circle_branch >= 0 ? +1 : -1;
  } else {
    fam.branch = (e - fam.r0 * c0) >= 0.0 ? +1 : -1;
    if (delta <= 0.0) throw BifurcationError("build_family: boundary configuration (tangent chord)");
  }

  int n = 0;
  for (double x : schedule) {
    ++n;
    FamilyMember m;
    m.n = n;
    if (fam.circle) {
      if (!(x > 0.0 && x < 1.0)) {
        fam.warnings.push_back("member " + std::to_string(n) + ": e_n outside (0, 1), schedule truncated");
        break;
      }
      m.e_n = x;
      m.phi_n = fam.phi0 + fam.branch * std::acos(x);
    } else {
      m.phi_n = x;
      const double cn = std::cos(x - fam.phi0);
      const double dn = fam.r0 * fam.r0 * cn * cn + 1.0 - 2.0 * fam.r0;
      m.e_n = e + detail::eccentricity_shift(fam.r0, fam.phi0, x, fam.branch);
      if (dn < 0.0 || !(m.e_n >= 0.0 && m.e_n < 1.0) || x == 0.0) {
        fam.warnings.push_back("member " + std::to_string(n) + ": eccentricity branch leaves [0, 1), schedule truncated");
        break;
      }
    }
    m.frame_ellipse = KeplerEllipse(m.e_n, pi + m.phi_n);
    m.ellipse = fam.frame.ellipse_from_frame(m.frame_ellipse);
    m.membership_residual = std::abs(polar_radius(m.ellipse, p.angle()) - p.radius());
    fam.members.push_back(m);
  }
  return fam;
}

struct IntersectionPoint {
  int n = 0;
  double phi_n = 0.0;
  double psi = 0.0;             // polar angle in the working frame
  double radius = 0.0;
  PlanePoint point;             // original plane
  double closed_form_gap = 0.0; // distance between the selected closed-form root and the generic solver's root
  double distance_to_antipode = 0.0;
};

/// The common point of the base ellipse and each member other than p.
inline std::vector<IntersectionPoint> track_intersections(const PerturbedFamily& fam) {
  const double e = fam.base.eccentricity();
  const double l = fam.base.semi_latus_rectum();
  const PlanePoint anchor_frame = fam.frame.to_frame(fam.anchor);
  const PlanePoint pf = antipodal_point(fam.base, fam.anchor);
  std::vector<IntersectionPoint> out;
  for (const auto& m : fam.members) {
    IntersectionPoint ip;
    ip.n = m.n;
    ip.phi_n = m.phi_n;
    const double en = m.e_n;
    double A, B, C;
    if (fam.circle) {
      A = -en * std::cos(m.phi_n);
      B = en * std::sin(m.phi_n);
      C = en * en;
    } else {
      const double de = detail::eccentricity_shift(fam.r0, fam.phi0, m.phi_n, fam.branch);
      const double half = std::sin(0.5 * m.phi_n);
      A = -de * (1.0 + e * en) + en * (1.0 - e * e) * 2.0 * half * half;
      B = en * (1.0 - e * e) * std::sin(m.phi_n);
      C = de * (en + e);
    }
    const double n2 = A * A + B * B;
    const double D = n2 - C * C;
    if (!(n2 > 0.0) || D < 0.0) throw BifurcationError("track_intersections: member " + std::to_string(m.n) + " misses the base ellipse");
    const double sq = std::sqrt(D);

    // Both roots of A cos psi + B sin psi + C = 0; one of them is p.
    const std::array<double, 2> roots{std::atan2((-B * C - A * sq) / n2, (-A * C + B * sq) / n2),
                                      std::atan2((-B * C + A * sq) / n2, (-A * C - B * sq) / n2)};
    auto frame_point = [&](double psi) { return PlanePoint::from_polar(l / (1.0 - e * std::cos(psi)), psi); };
    const double anchor_angle = std::atan2(anchor_frame.y, anchor_frame.x);
    std::vector<double> others;
    for (double psi : roots) {
      if (distance(frame_point(psi), anchor_frame) > 1e-9) others.push_back(psi);
    }
    if (others.size() != 1) {
      throw BifurcationError("track_intersections: member " + std::to_string(m.n) + " has " +
                             std::to_string(others.size()) + " intersections besides p");
    }
    (void)anchor_angle;
    ip.psi = others.front();

    // Closed-form selection: cos psi = (-AC + |B| sq)/(A^2+B^2),
    // sin psi = (-A |B| sq - B^2 C)/(B (A^2+B^2)).
    double cf_psi;
    if (fam.circle) {
      const double a1 = -m.phi_n + std::acos(en), a2 = -m.phi_n - std::acos(en);
      cf_psi = distance(frame_point(a1), anchor_frame) > distance(frame_point(a2), anchor_frame) ? a1 : a2;
    } else {
      // The |B| root for the e = r0 cos phi0 + sqrt(Delta) branch, the other root otherwise.
      const double absb = fam.branch * std::abs(B);
      cf_psi = std::atan2((-A * absb * sq - B * B * C) / (B * n2), (-A * C + absb * sq) / n2);
    }
    ip.closed_form_gap = distance(frame_point(cf_psi), frame_point(ip.psi));

    const PlanePoint y = frame_point(ip.psi);
    ip.radius = y.radius();
    ip.point = fam.frame.from_frame(y);
    ip.distance_to_antipode = distance(ip.point, pf);
    out.push_back(ip);
  }
  return out;
}

/// Closed-form limit of the intersection points and the two slopes of the
/// focal chord, with sq = e - r0 cos phi0 (signed) and
///   U = 2e(1+e^2) r0^2 sin^2 phi0,  V = (1-r0)(1-e^2)^2,
///   Z = (1+e^2)^2 r0^2 sin^2 phi0 + (1-e^2)^2 Delta,
///   cos psi* = (U + V sq)/Z,
///   sin psi* = -(1-e^2) r0 sin phi0 (2e sq - (1-r0)(1+e^2))/Z,
///   r* = (1-e^2) Z / (2 (Z - e (U + V sq))).
struct BifurcationLimit {
  double E = 0.0, F = 0.0, delta = 0.0;
  double U = 0.0, V = 0.0, Z = 0.0;
  double psi_star = 0.0, r_star = 0.0;
  double m = 0.0, m_star = 0.0;
  double m_chord = 0.0;  // slope of the line through p* and f, in the working frame
  PlanePoint point;      // p* in the original plane
  PlanePoint antipode;   // p_f from the focal-chord construction
  double antipode_gap = 0.0;
  double collinearity = 0.0;  // doubled area of (p*, f, p)
};

inline BifurcationLimit limit_point(const PerturbedFamily& fam) {
  if (fam.circle) throw BifurcationError("limit_point: circle base has no Taylor limit");
  const double r0 = fam.r0, s = std::sin(fam.phi0), c = std::cos(fam.phi0);
  if (s == 0.0) throw BifurcationError("limit_point: p on the axis of the base ellipse");
  const double e = fam.base.eccentricity();
  BifurcationLimit L;
  L.delta = r0 * r0 * c * c + 1.0 - 2.0 * r0;
  if (!(L.delta > 0.0)) throw BifurcationError("limit_point: boundary configuration");
  const double sq = fam.branch * std::sqrt(L.delta);
  L.E = -r0 * r0 * c * s / sq;
  L.F = 0.5 * (-r0 * c + r0 * r0 * (s * s - c * c) / sq - std::pow(r0, 4) * c * c * s * s / (sq * sq * sq));
  const double one_m_e2 = 1.0 - e * e, one_p_e2 = 1.0 + e * e;
  L.U = 2.0 * e * one_p_e2 * r0 * r0 * s * s;
  L.V = (1.0 - r0) * one_m_e2 * one_m_e2;
  L.Z = one_p_e2 * one_p_e2 * r0 * r0 * s * s + one_m_e2 * one_m_e2 * L.delta;
  const double uv = L.U + L.V * sq;
  const double cos_star = uv / L.Z;
  const double sin_star = -one_m_e2 * r0 * s * (-(1.0 - r0) * one_p_e2 + 2.0 * e * sq) / L.Z;
  L.psi_star = std::atan2(sin_star, cos_star);
  L.r_star = 0.5 * one_m_e2 * L.Z / (L.Z - e * uv);
  L.m = r0 * s / sq;
  L.m_star = -r0 * s * (2.0 * e * L.Z - one_p_e2 * uv) / (one_m_e2 * uv - 2.0 * e * L.Z + 2.0 * e * e * uv) / sq;

  const PlanePoint y = PlanePoint::from_polar(L.r_star, L.psi_star);
  L.m_chord = y.y / (y.x - e);
  L.point = fam.frame.from_frame(y);
  L.antipode = antipodal_point(fam.base, fam.anchor);
  L.antipode_gap = distance(L.point, L.antipode);
  L.collinearity = std::abs(triangle_area2(L.point, second_focus(fam.base), fam.anchor));
  return L;
}

/// Repeated Richardson extrapolation of a sequence x_n = x* + c1 h_n + c2 h_n^2 + ...
/// with h_{n+1} = h_n / ratio. Returns the last entry of level `levels`.
inline double richardson(const std::vector<double>& seq, int levels = 2, double ratio = 2.0) {
  if (static_cast<int>(seq.size()) < levels + 1) throw std::invalid_argument("richardson: sequence too short");
  std::vector<double> t(seq.end() - (levels + 1), seq.end());
  double factor = ratio;
  for (int k = 0; k < levels; ++k, factor *= ratio) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) t[i] = (factor * t[i + 1] - t[i]) / (factor - 1.0);
    t.pop_back();
  }
  return t.front();
}

/// Least-squares slope of log y against log x.
inline double fit_order(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_order: need at least two positive samples");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ConvergenceSummary {
  std::vector<double> phi;       // phi_n
  std::vector<double> distance;  // |p_n - p_f|
  double order = 0.0;
  double psi_extrapolated = 0.0;
  double r_extrapolated = 0.0;
  double psi_error = 0.0;        // against the closed-form limit
  double r_error = 0.0;
  bool monotone = true;
};

/// Distances to p_f, fitted order, and Richardson limit over the members
/// whose distance stays above `floor`.
inline ConvergenceSummary convergence(const std::vector<IntersectionPoint>& pts, const BifurcationLimit& lim,
                                      double floor = 1e-13) {
  ConvergenceSummary cs;
  std::vector<double> psi, r;
  for (const auto& ip : pts) {
    if (ip.distance_to_antipode <= floor) break;
    cs.phi.push_back(ip.phi_n);
    cs.distance.push_back(ip.distance_to_antipode);
    const double unwrapped = lim.psi_star + angle_diff(ip.psi, lim.psi_star);
    psi.push_back(unwrapped);
    r.push_back(ip.radius);
  }
  for (std::size_t i = 1; i < cs.distance.size(); ++i) {
    if (!(cs.distance[i] < cs.distance[i - 1])) cs.monotone = false;
  }
  cs.order = fit_order(cs.phi, cs.distance);
  cs.psi_extrapolated = richardson(psi);
  cs.r_extrapolated = richardson(r);
  cs.psi_error = std::abs(angle_diff(cs.psi_extrapolated, lim.psi_star));
  cs.r_error = std::abs(cs.r_extrapolated - lim.r_star);
  return cs;
}

/// Geodesic of the Jacobi metric at unit Maupertuis speed, W |x'|^2 = 1,
/// with the unwrapped polar angle carried as a fifth component.
struct GeodesicFlow {
  using State = ode::State<5>;
  void operator()(const State& x, State& dx, double) const {
    const PlanePoint pos{x[0], x[1]}, v{x[2], x[3]};
    const double w = KeplerWeight::value(pos);
    const PlanePoint gw = KeplerWeight::gradient(pos);
    const PlanePoint acc = (gw * (0.5 * dot(v, v)) - v * dot(gw, v)) / w;
    dx[0] = v.x;
    dx[1] = v.y;
    dx[2] = acc.x;
    dx[3] = acc.y;
    dx[4] = cross(pos, v) / dot(pos, pos);
  }

  static State initial(PlanePoint p, double direction) {
    const double speed = 1.0 / std::sqrt(KeplerWeight::value(p));
    return {p.x, p.y, speed * std::cos(direction), speed * std::sin(direction), std::atan2(p.y, p.x)};
  }
};

struct ShotResult {
  GeodesicFlow::State state{};
  double length = 0.0;  // Maupertuis length travelled
};

/// Follows the geodesic from p with the given initial direction until its
/// unwrapped polar angle reaches `target_angle`.
inline ShotResult shoot(PlanePoint p, double direction, double target_angle, ode::Tolerance tol = {1e-13, 1e-13},
                        double max_length = 10.0) {
  GeodesicFlow flow;
  GeodesicFlow::State x = GeodesicFlow::initial(p, direction);
  const double sign = target_angle >= x[4] ? 1.0 : -1.0;
  const double chunk = 0.05;
  double tau = 0.0, dt = 1e-3;
  while (tau < max_length) {
    GeodesicFlow::State y = x;
    ode::advance(flow, y, tau, tau + chunk, dt, tol);
    if (sign * (y[4] - target_angle) >= 0.0) {
      double lo = tau, hi = tau + chunk;
      GeodesicFlow::State at_lo = x;
      while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        GeodesicFlow::State z = at_lo;
        double dtl = 0.5 * (mid - lo);
        ode::advance(flow, z, lo, mid, dtl, tol);
        if (sign * (z[4] - target_angle) >= 0.0) {
          hi = mid;
        } else {
          lo = mid;
          at_lo = z;
        }
      }
      GeodesicFlow::State z = at_lo;
      double dtl = 0.5 * (hi - lo);
      ode::advance(flow, z, lo, 0.5 * (lo + hi), dtl, tol);
      return {z, 0.5 * (lo + hi)};
    }
    x = y;
    tau += chunk;
  }
  throw BifurcationError("shoot: geodesic did not reach the target angle");
}

struct ShootingMember {
  int n = 0;
  double phi_n = 0.0;
  double s_n = 0.0;               // gamma_*^{-1}(p_n)
  double direction_analytic = 0.0; // tangent of E_n at p
  double speed = 0.0;              // Maupertuis speed c_n = length(p -> p_n) / s_n
  double velocity_gap = 0.0;       // |gamma_n'(0) - gamma_*'(0)|
  bool shot = false;               // whether the shooting solve was run
  double direction = 0.0;          // shooting solution
  double direction_gap = 0.0;      // |direction - direction_analytic|
  double hit_residual = 0.0;       // |gamma_n(s_n) - p_n| along the shot geodesic
  int other_intersections = 0;    // common points with the base besides p and p_n
};

struct ShootingRecord {
  double s_star = 0.0;            // gamma_*^{-1}(p_f)
  double s_star_jacobi = -1.0;    // first conjugate parameter along gamma_*
  double speed_star = 0.0;        // Maupertuis length of the full ellipse
  std::vector<ShootingMember> members;
  bool unique_accumulation = true;

  double final_parameter_gap() const { return members.empty() ? -1.0 : std::abs(members.back().s_n - s_star); }
  double final_velocity_gap() const { return members.empty() ? -1.0 : members.back().velocity_gap; }
};

struct ShootingOptions {
  int orientation = +1;
  double direction_tol = 1e-12;
  int scan_points = 4000;
  bool with_jacobi = true;
  // Below this phi_n the residual |gamma(tau)| - |p_n| is of order phi_n^2
  // and drowns in integration error; members there use the closed form only.
  double shoot_floor = 1e-5;
};

namespace detail {

inline double tangent_direction(const KeplerEllipse& ell, PlanePoint p, int orientation) {
  // d/dphi of r(phi) e^{i phi}, oriented
  const double phi = p.angle();
  const double e = ell.eccentricity();
  const double r = polar_radius(ell, phi);
  const double dr = r * r * e * std::sin(phi + ell.phi_prime()) / ell.semi_latus_rectum();
  const PlanePoint t{dr * std::cos(phi) - r * std::sin(phi), dr * std::sin(phi) + r * std::cos(phi)};
  return std::atan2(orientation * t.y, orientation * t.x);
}

inline int count_sign_changes(const KeplerEllipse& a, const KeplerEllipse& b, double skip_angle, double skip_width,
                              int points) {
  int changes = 0;
  double prev = 0.0;
  bool have_prev = false;
  for (int i = 0; i <= points; ++i) {
    const double phi = two_pi * i / points;
    if (std::abs(angle_diff(phi, skip_angle)) < skip_width) {
      have_prev = false;
      continue;
    }
    const double d = polar_radius(a, phi) - polar_radius(b, phi);
    if (have_prev && ((d < 0.0) != (prev < 0.0))) ++changes;
    prev = d;
    have_prev = true;
  }
  return changes;
}

}  // namespace detail

/// Shooting construction of the bifurcating geodesics gamma_n from p toward
/// p_n, compared with the closed geodesic gamma_* along the base ellipse.
inline ShootingRecord shooting_bifurcation(const PerturbedFamily& fam, const std::vector<IntersectionPoint>& pts,
                                           const ShootingOptions& opt = {}) {
  ShootingRecord rec;
  const PlanePoint p = fam.anchor;
  const GeodesicSampler gstar(time_parameterize(full_orbit_arc(fam.base, p, opt.orientation)));
  const PlanePoint pf = antipodal_point(fam.base, p);
  rec.s_star = gstar.parameter_of_point(pf);
  rec.speed_star = std::sqrt(2.0) * gstar.weight_integral_total();
  const double dir_star = detail::tangent_direction(fam.base, p, opt.orientation);
  const double w0 = KeplerWeight::value(p);
  const PlanePoint v_star = PlanePoint::from_polar(rec.speed_star / std::sqrt(w0), dir_star);

  if (opt.with_jacobi) {
    JacobiOptions jo;
    jo.s_end = 1.0;
    jo.overshoot = 0.0;
    const auto cps = jacobi_conjugate_points(gstar, jo);
    if (!cps.empty()) rec.s_star_jacobi = cps.front().parameter;
  }

  for (std::size_t i = 0; i < pts.size() && i < fam.members.size(); ++i) {
    const auto& m = fam.members[i];
    const auto& ip = pts[i];
    ShootingMember sm;
    sm.n = m.n;
    sm.phi_n = m.phi_n;
    sm.s_n = gstar.parameter_of_point(ip.point);

    int orient_n = opt.orientation;
    double dir_a = detail::tangent_direction(m.ellipse, p, orient_n);
    if (std::cos(dir_a - dir_star) < 0.0) {
      orient_n = -orient_n;
      dir_a = detail::tangent_direction(m.ellipse, p, orient_n);
    }
    sm.direction_analytic = dir_a;

    // gamma_n along the member ellipse, closed form
    KeplerArc arc_n;
    arc_n.ellipse = m.ellipse;
    arc_n.orientation = orient_n;
    arc_n.start_angle = p.angle();
    arc_n.span = orient_n * wrap_angle(orient_n * (ip.point.angle() - p.angle()));
    const GeodesicSampler gn(time_parameterize(arc_n));
    sm.speed = std::sqrt(2.0) * gn.weight_integral_total() / sm.s_n;
    const PlanePoint v_n = PlanePoint::from_polar(sm.speed / std::sqrt(w0), dir_a);
    sm.velocity_gap = distance(v_n, v_star);

    if (m.phi_n >= opt.shoot_floor) {
      sm.shot = true;
      const double start_angle = std::atan2(p.y, p.x);
      const double target = start_angle + arc_n.span;
      auto residual = [&](double dir) {
        const ShotResult sr = shoot(p, dir, target);
        return PlanePoint{sr.state[0], sr.state[1]}.radius() - ip.point.radius();
      };
      const double half = 0.5 * std::abs(angle_diff(dir_a, dir_star));
      double lo = dir_a - half, hi = dir_a + half;
      double f_lo = residual(lo);
      const double f_hi = residual(hi);
      if ((f_lo < 0.0) == (f_hi < 0.0)) {
        throw BifurcationError("shooting_bifurcation: member " + std::to_string(m.n) +
                               " is not bracketed (residuals " + std::to_string(f_lo) + ", " + std::to_string(f_hi) + ")");
      }
      while (hi - lo > opt.direction_tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      sm.direction = 0.5 * (lo + hi);
      sm.direction_gap = std::abs(angle_diff(sm.direction, dir_a));
      const ShotResult hit = shoot(p, sm.direction, target);
      sm.hit_residual = distance(PlanePoint{hit.state[0], hit.state[1]}, ip.point);
    }

    const int changes = detail::count_sign_changes(fam.base, m.ellipse, p.angle(), 1e-3, opt.scan_points);
    sm.other_intersections = std::max(0, changes - 1);
    if (sm.other_intersections != 0) rec.unique_accumulation = false;
    rec.members.push_back(sm);
  }
  return rec;
}

}  // namespace kepler_arcs
