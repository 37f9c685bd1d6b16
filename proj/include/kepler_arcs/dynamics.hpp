// Time law of Keplerian arcs, direct integration of the Kepler problem, and
// the Maupertuis reparameterization turning an arc into a geodesic of the
// Jacobi metric W(x) <.,.> with W = 1/|x| - 1.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/geometry.hpp"
#include "kepler_arcs/ode.hpp"
#include "kepler_arcs/weight.hpp"

namespace kepler_arcs {

/// Semi-major axis and mean motion of every normalized orbit.
inline constexpr double semi_major_axis = 0.5;
inline const double mean_motion = 2.0 * std::sqrt(2.0);  // a^{-3/2}
/// Orbital period 2 pi a^{3/2} = pi / sqrt(2), the same for every e.
inline const double orbital_period = pi / std::sqrt(2.0);

struct KeplerState {
  PlanePoint position;
  PlanePoint velocity;

  double energy() const { return 0.5 * dot(velocity, velocity) - 1.0 / position.radius(); }
  double angular_momentum() const { return cross(position, velocity); }
};

class NearCollision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves u - e sin u = M by safeguarded Newton iteration on the bracket
/// [M - e, M + e], started from Danby's guess M + 0.85 e sign(sin M).
inline double solve_kepler(double mean_anomaly, double e, int max_iter = 100) {
  if (e == 0.0) return mean_anomaly;
  const double k = std::round(mean_anomaly / two_pi);
  const double m = mean_anomaly - two_pi * k;
  auto f = [&](double u) {
    return std::make_pair(u - e * std::sin(u) - m, 1.0 - e * std::cos(u));
  };
  const double guess = std::clamp(m + 0.85 * e * (std::sin(m) < 0.0 ? -1.0 : 1.0), m - e, m + e);
  std::uintmax_t iters = max_iter;
  const double u = boost::math::tools::newton_raphson_iterate(f, guess, m - e, m + e,
                                                              std::numeric_limits<double>::digits - 2, iters);
  if (iters >= static_cast<std::uintmax_t>(max_iter)) throw std::runtime_error("solve_kepler: no convergence");
  return u + two_pi * k;
}

/// Eccentric anomaly from true anomaly, continuous in nu (nu = 2 pi k maps to u = 2 pi k).
inline double eccentric_from_true(double nu, double e) {
  const double k = std::floor((nu + pi) / two_pi);
  const double nu0 = nu - two_pi * k;
  const double u0 = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * nu0), std::sqrt(1.0 + e) * std::cos(0.5 * nu0));
  return u0 + two_pi * k;
}

/// A KeplerArc together with its closed-form time law. The motion runs over
/// t in [-omega, omega]; the sampler also extrapolates outside that window
/// along the same ellipse.
class TimedArc {
 public:
  explicit TimedArc(const KeplerArc& arc) : arc_(arc) {
    e_ = arc.ellipse.eccentricity();
    b_ = semi_major_axis * std::sqrt(1.0 - e_ * e_);
    w_ = arc.ellipse.perihelion_direction();
    w_perp_ = perp(w_) * static_cast<double>(arc.orientation);
    const double nu_start = true_anomaly(arc.start());
    u_start_ = eccentric_from_true(nu_start, e_);
    u_end_ = eccentric_from_true(nu_start + std::abs(arc.span), e_);
    m_start_ = kepler_function(u_start_);
    half_time_ = (kepler_function(u_end_) - m_start_) / (2.0 * mean_motion);
  }

  const KeplerArc& arc() const { return arc_; }
  double eccentricity() const { return e_; }
  double half_time() const { return half_time_; }
  double anomaly_start() const { return u_start_; }
  double anomaly_end() const { return u_end_; }
  int orientation() const { return arc_.orientation; }

  /// Signed angle from perihelion in the direction of motion.
  double true_anomaly(PlanePoint x) const { return std::atan2(dot(x, w_perp_), dot(x, w_)); }

  /// Eccentric anomaly of a point of the ellipse, unwrapped into [u_start - tol, u_start + 2 pi).
  double anomaly_of_point(PlanePoint x) const {
    double u = eccentric_from_true(true_anomaly(x), e_);
    while (u < u_start_ - 1e-12) u += two_pi;
    while (u >= u_start_ + two_pi - 1e-12) u -= two_pi;
    return u;
  }

  PlanePoint position_at_anomaly(double u) const {
    return w_ * (semi_major_axis * (std::cos(u) - e_)) + w_perp_ * (b_ * std::sin(u));
  }

  KeplerState state_at_anomaly(double u) const {
    const double rate = mean_motion / (1.0 - e_ * std::cos(u));
    const PlanePoint vel = (w_ * (-semi_major_axis * std::sin(u)) + w_perp_ * (b_ * std::cos(u))) * rate;
    return {position_at_anomaly(u), vel};
  }

  double time_at_anomaly(double u) const { return (kepler_function(u) - m_start_) / mean_motion - half_time_; }

  double anomaly_at_time(double t) const {
    return solve_kepler(m_start_ + mean_motion * (t + half_time_), e_);
  }

  KeplerState state(double t) const { return state_at_anomaly(anomaly_at_time(t)); }

 private:
  double kepler_function(double u) const { return u - e_ * std::sin(u); }

  KeplerArc arc_;
  double e_ = 0.0;
  double b_ = 0.0;
  PlanePoint w_, w_perp_;
  double u_start_ = 0.0, u_end_ = 0.0, m_start_ = 0.0;
  double half_time_ = 0.0;
};

inline TimedArc time_parameterize(const KeplerArc& arc) { return TimedArc(arc); }

/// The whole ellipse traversed once from p back to p.
inline KeplerArc full_orbit_arc(const KeplerEllipse& ell, PlanePoint p, int orientation) {
  if (!contains_point(ell, p, 1e-9)) throw GeometryError("full_orbit_arc: p is not on the ellipse");
  KeplerArc arc;
  arc.ellipse = ell;
  arc.start_angle = p.angle();
  arc.span = orientation > 0 ? two_pi : -two_pi;
  arc.orientation = orientation > 0 ? +1 : -1;
  arc.label.orientation = arc.orientation;
  return arc;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<KeplerState> states;
};

/// Integrates x'' = -x / |x|^3 from a normalized state (energy -1). Output at
/// `sample_times` (within [0, duration]); if empty, at 0 and `duration`.
inline Trajectory integrate_ode(const KeplerState& initial, double duration, double tol = 1e-12,
                                std::vector<double> sample_times = {}) {
  const double r0 = initial.position.radius();
  if (!(r0 > 0.0 && r0 < 1.0)) throw std::invalid_argument("integrate_ode: initial position outside the Hill's region");
  if (std::abs(initial.energy() + 1.0) > 1e-12 / r0) throw std::invalid_argument("integrate_ode: initial energy is not -1");
  if (duration < 0.0) throw std::invalid_argument("integrate_ode: negative duration");
  if (sample_times.empty()) sample_times = {0.0, duration};
  std::sort(sample_times.begin(), sample_times.end());

  auto rhs = [](const ode::State<4>& s, ode::State<4>& ds, double) {
    const double r2 = s[0] * s[0] + s[1] * s[1];
    const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = -s[0] * inv_r3;
    ds[3] = -s[1] * inv_r3;
  };

  Trajectory out;
  ode::State<4> s{initial.position.x, initial.position.y, initial.velocity.x, initial.velocity.y};
  double t = 0.0, dt = 1e-3;
  for (double ts : sample_times) {
    if (ts < 0.0 || ts > duration) throw std::invalid_argument("integrate_ode: sample time outside [0, duration]");
    try {
      ode::advance(rhs, s, t, ts, dt, {tol, tol});
    } catch (const ode::StepUnderflow&) {
      throw NearCollision("integrate_ode: near-collision (step size underflow)");
    }
    t = ts;
    if (std::hypot(s[0], s[1]) < 1e-9) throw NearCollision("integrate_ode: near-collision");
    out.times.push_back(ts);
    out.states.push_back({{s[0], s[1]}, {s[2], s[3]}});
  }
  return out;
}

/// Discrete path on the uniform mesh s_i = i/N, endpoints fixed.
struct GeodesicPath {
  std::vector<PlanePoint> nodes;

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  double step() const { return 1.0 / intervals(); }
};

/// Geodesic parameterization s in [0, 1] of a timed arc, with
/// s(t) = (1/S) int_{-omega}^{t} (1/|x| - 1) dtau. The weight integral is
/// evaluated by composite Gauss-Legendre quadrature in the eccentric anomaly.
class GeodesicSampler {
 public:
  explicit GeodesicSampler(TimedArc arc, int panels = 64) : arc_(std::move(arc)) {
    const double u0 = arc_.anomaly_start(), u1 = arc_.anomaly_end();
    panel_width_ = (u1 - u0) / panels;
    cumulative_.assign(panels + 1, 0.0);
    for (int k = 0; k < panels; ++k) {
      cumulative_[k + 1] = cumulative_[k] + panel_integral(u0 + k * panel_width_, u0 + (k + 1) * panel_width_);
    }
    total_ = cumulative_.back();
  }

  const TimedArc& timed_arc() const { return arc_; }
  /// S = int (1/|x| - 1) dt over the arc.
  double weight_integral_total() const { return total_; }

  /// Integrand of the weight integral in the anomaly: (1/r - 1) dt/du.
  double integrand(double u) const {
    const double r = arc_.position_at_anomaly(u).radius();
    const double e = arc_.eccentricity();
    return (1.0 / r - 1.0) * (1.0 - e * std::cos(u)) / mean_motion;
  }

  /// int_{u_start}^{u} (1/r - 1) dt.
  double weight_integral(double u) const {
    const double u0 = arc_.anomaly_start();
    const int panels = static_cast<int>(cumulative_.size()) - 1;
    double k_real = std::floor((u - u0) / panel_width_);
    const int k = static_cast<int>(std::clamp(k_real, 0.0, static_cast<double>(panels)));
    const double base_u = u0 + k * panel_width_;
    double acc = cumulative_[k];
    // Far outside the arc the remainder is split into panel-sized pieces.
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(u - base_u) / panel_width_)));
    const double piece = (u - base_u) / pieces;
    for (int j = 0; j < pieces; ++j) acc += panel_integral(base_u + j * piece, base_u + (j + 1) * piece);
    return acc;
  }

  double parameter_of_anomaly(double u) const { return weight_integral(u) / total_; }
  double parameter_of_point(PlanePoint x) const { return parameter_of_anomaly(arc_.anomaly_of_point(x)); }

  double anomaly_at_parameter(double s) const {
    const double target = s * total_;
    const double e = arc_.eccentricity();
    const double u0 = arc_.anomaly_start();
    // The integrand is (1 + e cos u)/n, bounded in [(1-e)/n, (1+e)/n].
    double lo = u0 + std::min(target * mean_motion / (1.0 + e), target * mean_motion / (1.0 - e));
    double hi = u0 + std::max(target * mean_motion / (1.0 + e), target * mean_motion / (1.0 - e));
    lo -= 1e-12;
    hi += 1e-12;
    double u = u0 + s * (arc_.anomaly_end() - u0);
    u = std::clamp(u, lo, hi);
    for (int it = 0; it < 100; ++it) {
      const double g = weight_integral(u) - target;
      if (g > 0.0) hi = u;
      else lo = u;
      double next = u - g / integrand(u);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - u);
      u = next;
      if (step <= 1e-15 * std::max(1.0, std::abs(u))) break;
    }
    return u;
  }

  PlanePoint position(double s) const { return arc_.position_at_anomaly(anomaly_at_parameter(s)); }

  /// d gamma / ds = x'(t) dt/ds = x'(t) S / W(x).
  PlanePoint velocity(double s) const {
    const KeplerState st = arc_.state_at_anomaly(anomaly_at_parameter(s));
    return st.velocity * (total_ / KeplerWeight::value(st.position));
  }

  KeplerState geodesic_state(double s) const {
    const KeplerState st = arc_.state_at_anomaly(anomaly_at_parameter(s));
    return {st.position, st.velocity * (total_ / KeplerWeight::value(st.position))};
  }

  /// Time of the Kepler motion at geodesic parameter s.
  double time_at_parameter(double s) const { return arc_.time_at_anomaly(anomaly_at_parameter(s)); }

 private:
  double panel_integral(double a, double b) const {
    return boost::math::quadrature::gauss<double, 10>::integrate([this](double u) { return integrand(u); }, a, b);
  }

  TimedArc arc_;
  double panel_width_ = 0.0;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

/// Nodes gamma(s_i) on [s0, s1] rescaled to a uniform mesh on [0, 1].
inline GeodesicPath sample_path(const GeodesicSampler& g, int intervals, double s0 = 0.0, double s1 = 1.0) {
  if (intervals < 2) throw std::invalid_argument("sample_path: need at least 2 intervals");
  GeodesicPath path;
  path.nodes.reserve(intervals + 1);
  for (int i = 0; i <= intervals; ++i) path.nodes.push_back(g.position(s0 + (s1 - s0) * i / intervals));
  return path;
}

/// Geodesic sampled on N + 1 uniform nodes with the endpoints pinned to p and q.
inline GeodesicPath maupertuis_reparam(const TimedArc& ta, int intervals) {
  GeodesicPath path = sample_path(GeodesicSampler(ta), intervals);
  path.nodes.front() = ta.arc().start();
  path.nodes.back() = ta.arc().end();
  return path;
}

/// Nodes x(t_i) with t uniform on [-omega, omega] (affine time parameter).
inline GeodesicPath affine_time_path(const TimedArc& ta, int intervals) {
  GeodesicPath path;
  const double w = ta.half_time();
  for (int i = 0; i <= intervals; ++i) path.nodes.push_back(ta.state(-w + 2.0 * w * i / intervals).position);
  path.nodes.front() = ta.arc().start();
  path.nodes.back() = ta.arc().end();
  return path;
}

/// Second-order finite-difference velocities on the mesh.
inline std::vector<PlanePoint> mesh_velocities(const GeodesicPath& gp) {
  const int n = gp.intervals();
  const double h = gp.step();
  const auto& x = gp.nodes;
  std::vector<PlanePoint> v(n + 1);
  for (int i = 1; i < n; ++i) v[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
  v[0] = (x[0] * -3.0 + x[1] * 4.0 - x[2]) / (2.0 * h);
  v[n] = (x[n] * 3.0 - x[n - 1] * 4.0 + x[n - 2]) / (2.0 * h);
  return v;
}

/// Max deviation of |gamma'(s)| sqrt(W(gamma(s))) from its mesh mean.
inline double geodesic_speed_check(const GeodesicPath& gp) {
  const auto v = mesh_velocities(gp);
  std::vector<double> speed(v.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    speed[i] = norm(v[i]) * std::sqrt(KeplerWeight::value(gp.nodes[i]));
    mean += speed[i];
  }
  mean /= static_cast<double>(speed.size());
  double dev = 0.0;
  for (double sp : speed) dev = std::max(dev, std::abs(sp - mean));
  return dev;
}

/// Max over interior nodes of |(W gamma')' - 1/2 |gamma'|^2 grad W|,
/// central differences.
inline double geodesic_residual(const GeodesicPath& gp) {
  const int n = gp.intervals();
  const double h = gp.step();
  const auto& x = gp.nodes;
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    const double w_plus = KeplerWeight::value((x[i] + x[i + 1]) * 0.5);
    const double w_minus = KeplerWeight::value((x[i] + x[i - 1]) * 0.5);
    const PlanePoint flux = ((x[i + 1] - x[i]) * w_plus - (x[i] - x[i - 1]) * w_minus) / (h * h);
    const PlanePoint v = (x[i + 1] - x[i - 1]) / (2.0 * h);
    const PlanePoint res = flux - KeplerWeight::gradient(x[i]) * (0.5 * dot(v, v));
    worst = std::max(worst, norm(res));
  }
  return worst;
}

/// Trajectory in the original units: q(t') = x(|h|^{3/2} t') / |h|, rotated back.
class OriginalTrajectory {
 public:
  OriginalTrajectory(TimedArc ta, Scenario s) : ta_(std::move(ta)), s_(s) {}

  double half_time() const { return ta_.half_time() / std::pow(s_.scale(), 1.5); }

  KeplerState state(double t_orig) const {
    const double k = s_.scale();
    const KeplerState x = ta_.state(std::pow(k, 1.5) * t_orig);
    return {s_.to_original(x.position), rotate(x.velocity, -s_.rotation) * std::sqrt(k)};
  }

 private:
  TimedArc ta_;
  Scenario s_;
};

inline OriginalTrajectory denormalize(const TimedArc& ta, const Scenario& s) { return OriginalTrajectory(ta, s); }

}  // namespace kepler_arcs
