// Enumeration of the self-intersection free Keplerian arcs (energy -1)
// joining two points at equal distance R from the origin.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kepler_arcs/geometry.hpp"

namespace kepler_arcs {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Tolerance for routing a scenario to the R = 1/2 case.
inline constexpr double circle_radius_tol = 1e-9;
/// Tolerance for recognising the antipodal endpoints phi0 = pi/2.
inline constexpr double right_angle_tol = 1e-9;
/// Negative discriminants above -this are clamped to 0 (tangency).
inline constexpr double discriminant_clamp = 1e-12;

/// Normalized problem: p = R e^{-i phi0}, q = R e^{i phi0}.
/// `energy` and `rotation` record how the original endpoints were mapped:
/// x_normalized = |h| * rotate(x_original, rotation).
struct Scenario {
  double radius = 0.0;
  double half_angle = 0.0;
  double energy = -1.0;
  double rotation = 0.0;

  PlanePoint p() const { return PlanePoint::from_polar(radius, -half_angle); }
  PlanePoint q() const { return PlanePoint::from_polar(radius, half_angle); }
  double scale() const { return -energy; }

  PlanePoint to_original(PlanePoint x) const { return rotate(x, -rotation) / scale(); }
  PlanePoint from_original(PlanePoint x) const { return rotate(x, rotation) * scale(); }

  bool on_circle() const { return std::abs(radius - 0.5) < circle_radius_tol; }
  bool antipodal_endpoints() const { return std::abs(half_angle - 0.5 * pi) < right_angle_tol; }
  /// R = 1/2 and phi0 = pi/2: both solutions are semicircles with q conjugate to p.
  bool degenerate() const { return on_circle() && antipodal_endpoints(); }
};

inline Scenario make_scenario(double radius, double half_angle, double energy = -1.0) {
  if (!(radius > 0.0 && radius < 1.0)) throw ScenarioError("R must lie in (0, 1)");
  if (!(half_angle > 0.0 && half_angle < pi)) throw ScenarioError("phi0 must lie in (0, pi)");
  if (!(energy < 0.0)) throw ScenarioError("energy must be negative");
  return Scenario{radius, half_angle, energy, 0.0};
}

/// Scales original endpoints by |h| and rotates them so that they are
/// symmetric about the x-axis with p in the lower half-plane.
inline Scenario normalize(PlanePoint p_orig, PlanePoint q_orig, double energy) {
  if (!(energy < 0.0)) throw ScenarioError("normalize: energy must be negative");
  const double rp = p_orig.radius(), rq = q_orig.radius();
  if (rp == 0.0 || rq == 0.0) throw ScenarioError("normalize: endpoint at the origin");
  if (std::abs(rp - rq) > 1e-10) throw ScenarioError("normalize: endpoints at different distances from the origin");
  if (distance(p_orig, q_orig) <= 1e-14 * rp) throw ScenarioError("normalize: endpoints coincide");
  const double scale = -energy;
  if (!(scale * rp < 1.0)) throw ScenarioError("normalize: endpoints outside the Hill's region");

  const double ccw = wrap_angle(std::atan2(cross(p_orig, q_orig), dot(p_orig, q_orig)));
  Scenario s;
  s.radius = scale * rp;
  s.half_angle = 0.5 * ccw;
  s.energy = energy;
  s.rotation = -s.half_angle - std::atan2(p_orig.y, p_orig.x);
  return s;
}

enum class Regime {
  inside,            // R < 1/2
  on_circle,         // R = 1/2
  outside_low_band,  // R > 1/2, phi0 < arcsin((1-R)/R)
  outside_high_band, // R > 1/2, phi0 > pi - arcsin((1-R)/R)
  no_solution,       // R > 1/2 between the bands
};

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::inside: return "inside";
    case Regime::on_circle: return "on_circle";
    case Regime::outside_low_band: return "outside_low_band";
    case Regime::outside_high_band: return "outside_high_band";
    case Regime::no_solution: return "no_solution";
  }
  return "?";
}

inline Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::inside, Regime::on_circle, Regime::outside_low_band, Regime::outside_high_band,
                   Regime::no_solution}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown regime '" + s + "'");
}

enum class ArcKind { interior, exterior, circular };

/// Naming of an arc: kind, sign of the angular momentum, and the index 1/2
/// used when two ellipses produce arcs of the same kind and sign.
struct ArcLabel {
  ArcKind kind = ArcKind::interior;
  int orientation = +1;
  int index = 0;             // 0 = no index
  bool show_sign = true;     // the R = 1/2 elliptic arcs are named without sign

  std::string str() const {
    std::string s = kind == ArcKind::interior ? "int" : kind == ArcKind::exterior ? "ext" : "circ";
    if (index > 0) s += "_" + std::to_string(index);
    if (show_sign) s += orientation > 0 ? "+" : "-";
    return s;
  }
  bool operator==(const ArcLabel&) const = default;
};

inline ArcLabel parse_label(const std::string& text) {
  ArcLabel l;
  std::string s = text;
  if (s.empty()) throw std::invalid_argument("empty arc label");
  l.show_sign = false;
  if (s.back() == '+' || s.back() == '-') {
    l.show_sign = true;
    l.orientation = s.back() == '+' ? +1 : -1;
    s.pop_back();
  }
  const auto us = s.find('_');
  if (us != std::string::npos) {
    l.index = std::stoi(s.substr(us + 1));
    s = s.substr(0, us);
  }
  if (s == "int") l.kind = ArcKind::interior;
  else if (s == "ext") l.kind = ArcKind::exterior;
  else if (s == "circ") l.kind = ArcKind::circular;
  else throw std::invalid_argument("unknown arc label '" + text + "'");
  return l;
}

/// One solution: the part of `ellipse` traversed from p, starting at polar
/// angle `start_angle` and sweeping the signed angle `span` (ccw positive).
struct KeplerArc {
  KeplerEllipse ellipse;
  double start_angle = 0.0;
  double span = 0.0;
  int orientation = +1;  // sign of the angular momentum c_x
  ArcLabel label;
  Regime regime = Regime::inside;
  int ellipse_index = 0;  // position of the ellipse in chord_eccentricities
  bool degenerate_boundary = false;
  bool conjugate_degenerate = false;

  PlanePoint start() const { return point_at_angle(ellipse, start_angle); }
  PlanePoint end() const { return point_at_angle(ellipse, start_angle + span); }
  PlanePoint point_at_fraction(double lambda) const {
    return point_at_angle(ellipse, start_angle + lambda * span);
  }

  /// Whether the polar angle phi is strictly inside the traversed range.
  bool contains_angle(double phi, double tol = 1e-10) const {
    const double offset = wrap_angle(orientation * (phi - start_angle));
    return offset > tol && offset < std::abs(span) - tol;
  }
};

struct AngularInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double a) const { return a > lower && a < upper; }
};

struct EnumerationResult {
  std::vector<KeplerArc> arcs;
  std::optional<double> existence_bound;  // arcsin((1-R)/R) when R > 1/2
  Regime regime = Regime::inside;
};

/// Admissible phi0 for a given endpoint radius.
inline std::vector<AngularInterval> existence_band(double radius) {
  if (!(radius > 0.0 && radius < 1.0)) throw ScenarioError("existence_band: R must lie in (0, 1)");
  if (radius <= 0.5) return {{0.0, pi}};
  const double bound = std::asin((1.0 - radius) / radius);
  return {{0.0, bound}, {pi - bound, pi}};
}

inline Regime classify_regime(const Scenario& s) {
  if (s.on_circle()) return Regime::on_circle;
  if (s.radius < 0.5) return Regime::inside;
  const double bound = std::asin((1.0 - s.radius) / s.radius);
  if (s.half_angle < bound) return Regime::outside_low_band;
  if (s.half_angle > pi - bound) return Regime::outside_high_band;
  return Regime::no_solution;
}

/// An ellipse through both endpoints. phi' is 0 (second focus on the
/// negative x-axis) or pi (positive x-axis).
struct ChordEllipse {
  double eccentricity = 0.0;
  double phi_prime = 0.0;
  bool tangent = false;  // double root: the two ellipses of case (iii) merged

  KeplerEllipse ellipse() const { return KeplerEllipse(eccentricity, phi_prime); }
};

inline double chord_discriminant(double radius, double half_angle) {
  const double c = std::cos(half_angle);
  return radius * radius * c * c + 1.0 - 2.0 * radius;
}

/// Every ellipse (focus at 0, major axis 1, phi' in {0, pi}) through p and q.
/// Sorted by eccentricity within each orientation type.
inline std::vector<ChordEllipse> chord_eccentricities(const Scenario& s) {
  const double R = s.radius;
  const double c = std::cos(s.half_angle);
  double delta = chord_discriminant(R, s.half_angle);
  if (delta < 0.0 && delta > -discriminant_clamp) delta = 0.0;

  std::vector<ChordEllipse> out;
  if (s.on_circle()) {
    out.push_back({0.0, 0.0, false});
    if (!s.antipodal_endpoints()) {
      if (c > 0.0) out.push_back({c, pi, false});
      else out.push_back({-c, 0.0, false});
    }
    return out;
  }
  if (delta < 0.0) return out;
  const double sq = std::sqrt(delta);
  if (R < 0.5) {
    out.push_back({-R * c + sq, 0.0, false});  // r = l / (1 + e cos phi)
    out.push_back({R * c + sq, pi, false});    // r = l / (1 - e cos phi)
    return out;
  }
  // R > 1/2: both roots share the sign of cos(phi0).
  const double phi_prime = c > 0.0 ? pi : 0.0;
  const double base = std::abs(R * c);
  if (sq == 0.0) {
    out.push_back({base, phi_prime, true});
  } else {
    out.push_back({base - sq, phi_prime, false});
    out.push_back({base + sq, phi_prime, false});
  }
  return out;
}

/// Splits every chord ellipse at p and q into its two arcs and names them.
inline EnumerationResult enumerate_arcs(const Scenario& s) {
  EnumerationResult result;
  result.regime = classify_regime(s);
  if (s.radius > 0.5 && !s.on_circle()) result.existence_bound = std::asin((1.0 - s.radius) / s.radius);

  const auto chords = chord_eccentricities(s);
  const bool two_of_a_kind = (s.radius > 0.5 && !s.on_circle() && chords.size() == 2);
  const double phi0 = s.half_angle;

  for (std::size_t k = 0; k < chords.size(); ++k) {
    const ChordEllipse& ch = chords[k];
    const KeplerEllipse ell = ch.ellipse();
    // Right arc through angle 0 runs counterclockwise; left arc through pi runs clockwise.
    for (int orientation : {+1, -1}) {
      KeplerArc arc;
      arc.ellipse = ell;
      arc.start_angle = wrap_angle(-phi0);
      arc.span = orientation > 0 ? 2.0 * phi0 : -(two_pi - 2.0 * phi0);
      arc.orientation = orientation;
      arc.regime = result.regime;
      arc.ellipse_index = static_cast<int>(k);
      arc.degenerate_boundary = ch.tangent;
      arc.conjugate_degenerate = s.degenerate();

      ArcKind kind;
      if (ell.is_circle()) {
        kind = ArcKind::circular;
      } else {
        // For r = l/(1 + e cos phi) the radius grows as cos phi decreases.
        const bool focus_on_negative_axis = ch.phi_prime == 0.0;
        const bool right = orientation > 0;
        kind = (focus_on_negative_axis == right) ? ArcKind::interior : ArcKind::exterior;
      }
      arc.label.kind = kind;
      arc.label.orientation = orientation;
      arc.label.index = two_of_a_kind ? static_cast<int>(k) + 1 : 0;  // index 1: smaller e
      arc.label.show_sign = !(s.on_circle() && kind != ArcKind::circular);
      result.arcs.push_back(arc);
    }
  }
  return result;
}

}  // namespace kepler_arcs
