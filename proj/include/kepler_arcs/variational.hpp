// The energy functional E(gamma) = int |gamma'|^2 W(gamma) ds on discretized
// paths, its first and second variations, Morse index, Jacobi fields and
// conjugate points, and the geometric minimality criterion for Kepler arcs.
//
// Discretization: piecewise-linear elements on the uniform mesh s_i = i/N
// with one midpoint quadrature node per element,
//
//   E_N = sum_k |gamma_{k+1} - gamma_k|^2 / h * W((gamma_k + gamma_{k+1}) / 2).
//
// The gradient and Hessian below are the exact derivatives of E_N, i.e. the
// first and second variation integrals evaluated with the same elements.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kepler_arcs/dynamics.hpp"
#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/geometry.hpp"
#include "kepler_arcs/ode.hpp"
#include "kepler_arcs/weight.hpp"

namespace kepler_arcs {

class HillRegionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// General 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
  static Mat2 from(const SymMat2& m) { return {m.xx, m.xy, m.xy, m.yy}; }
  /// u v^T
  static Mat2 outer(PlanePoint u, PlanePoint v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

  Mat2 transpose() const { return {a, c, b, d}; }
  double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    const double dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
  }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  PlanePoint operator*(PlanePoint v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2& operator+=(const Mat2& o) { return *this = *this + o; }
  double max_abs_row_sum() const { return std::max(std::abs(a) + std::abs(b), std::abs(c) + std::abs(d)); }
};

namespace detail {

template <class Weight>
void check_path(const GeodesicPath& gp) {
  if (gp.intervals() < 2) throw std::invalid_argument("path needs at least 2 intervals");
  for (std::size_t i = 0; i < gp.nodes.size(); ++i) {
    if (!HillRegion::contains(gp.nodes[i])) {
      throw HillRegionError("path node " + std::to_string(i) + " is outside the Hill's region");
    }
  }
}

/// Hessian blocks of one element f(a, b) = |b - a|^2 / h W((a + b) / 2).
struct ElementHessian {
  Mat2 aa, ab, bb;
};

template <class Weight>
ElementHessian element_hessian(PlanePoint xa, PlanePoint xb, double h) {
  const PlanePoint d = xb - xa;
  const PlanePoint m = (xa + xb) * 0.5;
  const double w = Weight::value(m);
  const PlanePoint g = Weight::gradient(m);
  const Mat2 g_dd = Mat2::identity(2.0 * w / h);
  const Mat2 g_dm = Mat2::outer(d, g) * (2.0 / h);
  const Mat2 g_md = g_dm.transpose();
  const Mat2 g_mm = Mat2::from(Weight::hessian(m)) * (dot(d, d) / h);
  ElementHessian e;
  e.aa = g_dd - (g_dm + g_md) * 0.5 + g_mm * 0.25;
  e.bb = g_dd + (g_dm + g_md) * 0.5 + g_mm * 0.25;
  e.ab = g_dd * -1.0 - g_dm * 0.5 + g_md * 0.5 + g_mm * 0.25;
  return e;
}

/// Number of negative eigenvalues of a symmetric 2x2 matrix.
inline int negative_count(const Mat2& m) {
  const double sym_b = 0.5 * (m.b + m.c);
  const double det = m.a * m.d - sym_b * sym_b;
  const double tr = m.a + m.d;
  if (det < 0.0) return 1;
  if (det > 0.0) return tr < 0.0 ? 2 : 0;
  return tr < 0.0 ? 1 : 0;
}

}  // namespace detail

template <class Weight = KeplerWeight>
double energy(const GeodesicPath& gp) {
  detail::check_path<Weight>(gp);
  const double h = gp.step();
  double e = 0.0;
  for (int k = 0; k < gp.intervals(); ++k) {
    const PlanePoint d = gp.nodes[k + 1] - gp.nodes[k];
    e += dot(d, d) / h * Weight::value((gp.nodes[k] + gp.nodes[k + 1]) * 0.5);
  }
  return e;
}

/// Gradient of E_N with respect to the interior nodes, flattened
/// (x_1, y_1, ..., x_{N-1}, y_{N-1}).
template <class Weight = KeplerWeight>
std::vector<double> energy_gradient(const GeodesicPath& gp) {
  detail::check_path<Weight>(gp);
  const int n = gp.intervals();
  const double h = gp.step();
  std::vector<PlanePoint> g(n + 1);
  for (int k = 0; k < n; ++k) {
    const PlanePoint d = gp.nodes[k + 1] - gp.nodes[k];
    const PlanePoint m = (gp.nodes[k] + gp.nodes[k + 1]) * 0.5;
    const double w = Weight::value(m);
    const PlanePoint half_grad = Weight::gradient(m) * (0.5 * dot(d, d) / h);
    g[k] += d * (-2.0 * w / h) + half_grad;
    g[k + 1] += d * (2.0 * w / h) + half_grad;
  }
  std::vector<double> out;
  out.reserve(2 * (n - 1));
  for (int i = 1; i < n; ++i) {
    out.push_back(g[i].x);
    out.push_back(g[i].y);
  }
  return out;
}

/// Block-tridiagonal symmetric matrix of d^2 E_N on the interior nodes.
class SecondVariation {
 public:
  SecondVariation() = default;
  SecondVariation(std::vector<Mat2> diagonal, std::vector<Mat2> upper)
      : diag_(std::move(diagonal)), upper_(std::move(upper)) {}

  int blocks() const { return static_cast<int>(diag_.size()); }
  int dim() const { return 2 * blocks(); }
  const std::vector<Mat2>& diagonal() const { return diag_; }
  /// upper()[k] couples interior block k (row) with block k + 1 (column).
  const std::vector<Mat2>& upper() const { return upper_; }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(v.size(), 0.0);
    auto at = [&](int k) { return PlanePoint{v[2 * k], v[2 * k + 1]}; };
    for (int k = 0; k < blocks(); ++k) {
      PlanePoint r = diag_[k] * at(k);
      if (k > 0) r += upper_[k - 1].transpose() * at(k - 1);
      if (k + 1 < blocks()) r += upper_[k] * at(k + 1);
      out[2 * k] = r.x;
      out[2 * k + 1] = r.y;
    }
    return out;
  }

  double quadratic_form(const std::vector<double>& v) const {
    const auto av = apply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * av[i];
    return s;
  }

  /// Infinity norm, an upper bound on the spectral radius.
  double norm() const {
    double worst = 0.0;
    for (int k = 0; k < blocks(); ++k) {
      const std::array<double, 2> row0{std::abs(diag_[k].a) + std::abs(diag_[k].b),
                                       std::abs(diag_[k].c) + std::abs(diag_[k].d)};
      std::array<double, 2> row = row0;
      if (k > 0) {
        const Mat2 lt = upper_[k - 1].transpose();
        row[0] += std::abs(lt.a) + std::abs(lt.b);
        row[1] += std::abs(lt.c) + std::abs(lt.d);
      }
      if (k + 1 < blocks()) {
        row[0] += std::abs(upper_[k].a) + std::abs(upper_[k].b);
        row[1] += std::abs(upper_[k].c) + std::abs(upper_[k].d);
      }
      worst = std::max({worst, row[0], row[1]});
    }
    return worst;
  }

  /// Number of eigenvalues strictly below `shift`, from the inertia of the
  /// block LDL^T factorization of A - shift I (Sylvester's law of inertia).
  int count_below(double shift) const {
    int negatives = 0;
    Mat2 prev_inv;
    const double nudge = 1e-300 + 1e-15 * std::max(norm(), 1e-300);
    for (int k = 0; k < blocks(); ++k) {
      Mat2 dk = diag_[k] - Mat2::identity(shift);
      if (k > 0) dk = dk - upper_[k - 1].transpose() * prev_inv * upper_[k - 1];
      dk.b = dk.c = 0.5 * (dk.b + dk.c);
      if (dk.det() == 0.0) dk = dk + Mat2::identity(nudge);
      negatives += detail::negative_count(dk);
      prev_inv = dk.inverse();
    }
    return negatives;
  }

  /// Smallest eigenvalue by bisection on count_below.
  double smallest_eigenvalue(double rel_tol = 1e-13) const {
    const double nrm = norm();
    double lo = -nrm - 1.0, hi = nrm + 1.0;
    while (hi - lo > rel_tol * std::max(nrm, 1.0)) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) >= 1) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    auto put = [&](int r, int c, const Mat2& b) {
      m(2 * r, 2 * c) = b.a;
      m(2 * r, 2 * c + 1) = b.b;
      m(2 * r + 1, 2 * c) = b.c;
      m(2 * r + 1, 2 * c + 1) = b.d;
    };
    for (int k = 0; k < blocks(); ++k) {
      put(k, k, diag_[k]);
      if (k + 1 < blocks()) {
        put(k, k + 1, upper_[k]);
        put(k + 1, k, upper_[k].transpose());
      }
    }
    return m;
  }

 private:
  std::vector<Mat2> diag_;
  std::vector<Mat2> upper_;
};

template <class Weight = KeplerWeight>
SecondVariation assemble_hessian(const GeodesicPath& gp) {
  detail::check_path<Weight>(gp);
  const int n = gp.intervals();
  const double h = gp.step();
  std::vector<Mat2> diag(n - 1), upper(std::max(0, n - 2));
  for (int k = 0; k < n; ++k) {
    const auto eh = detail::element_hessian<Weight>(gp.nodes[k], gp.nodes[k + 1], h);
    // element k joins nodes k and k + 1, i.e. interior blocks k - 1 and k
    if (k >= 1) diag[k - 1] += eh.aa;
    if (k + 1 <= n - 1) diag[k] += eh.bb;
    if (k >= 1 && k + 1 <= n - 1) upper[k - 1] += eh.ab;
  }
  return SecondVariation(std::move(diag), std::move(upper));
}

/// Dense Hessian of E_N on a closed path: nodes gamma_0 .. gamma_{N-1}, with
/// gamma_N = gamma_0, all nodes free.
template <class Weight = KeplerWeight>
Eigen::MatrixXd assemble_periodic_hessian(const std::vector<PlanePoint>& loop) {
  const int n = static_cast<int>(loop.size());
  if (n < 3) throw std::invalid_argument("periodic path needs at least 3 nodes");
  for (const auto& x : loop) {
    if (!HillRegion::contains(x)) throw HillRegionError("closed path leaves the Hill's region");
  }
  const double h = 1.0 / n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  auto add = [&](int r, int c, const Mat2& b) {
    m(2 * r, 2 * c) += b.a;
    m(2 * r, 2 * c + 1) += b.b;
    m(2 * r + 1, 2 * c) += b.c;
    m(2 * r + 1, 2 * c + 1) += b.d;
  };
  for (int k = 0; k < n; ++k) {
    const int k1 = (k + 1) % n;
    const auto eh = detail::element_hessian<Weight>(loop[k], loop[k1], h);
    add(k, k, eh.aa);
    add(k1, k1, eh.bb);
    add(k, k1, eh.ab);
    add(k1, k, eh.ab.transpose());
  }
  return m;
}

struct MorseIndex {
  int index = 0;
  double threshold = 0.0;      // eigenvalues below -threshold count as negative
  double matrix_norm = 0.0;
  double smallest_eigenvalue = 0.0;
  bool near_threshold = false; // some eigenvalue within `guard` thresholds of zero
  int intervals = 0;
};

/// Counts eigenvalues below -rel_threshold * ||A||.
inline MorseIndex morse_index(const SecondVariation& sv, double rel_threshold = 1e-8, double guard = 10.0) {
  MorseIndex mi;
  mi.matrix_norm = sv.norm();
  mi.threshold = rel_threshold * mi.matrix_norm;
  mi.index = sv.count_below(-mi.threshold);
  mi.near_threshold = sv.count_below(-guard * mi.threshold) != sv.count_below(guard * mi.threshold);
  mi.smallest_eigenvalue = sv.smallest_eigenvalue();
  mi.intervals = sv.blocks() + 1;
  return mi;
}

/// Morse index on the geodesic sampled at N nodes; the mesh is doubled (up to
/// `max_intervals`) while an eigenvalue sits near the threshold.
inline MorseIndex morse_index_refined(const GeodesicSampler& g, int intervals = 400, int max_intervals = 3200,
                                      double rel_threshold = 1e-8) {
  MorseIndex mi;
  for (int n = intervals;; n *= 2) {
    GeodesicPath gp = sample_path(g, n);
    gp.nodes.front() = g.timed_arc().arc().start();
    gp.nodes.back() = g.timed_arc().arc().end();
    mi = morse_index(assemble_hessian(gp), rel_threshold);
    if (!mi.near_threshold || 2 * n > max_intervals) return mi;
  }
}

struct ConjugatePoint {
  double parameter = 0.0;  // s* in the geodesic parameter
  int multiplicity = 0;
  PlanePoint position;

  bool operator==(const ConjugatePoint&) const = default;
};

struct JacobiOptions {
  double s_end = 1.0;        // report conjugate points up to s_end (plus endpoint tolerance)
  double overshoot = 0.01;   // scan slightly past s_end to catch an endpoint zero
  int grid = 400;            // sign-change scan resolution per unit s
  double bisection_tol = 1e-10;
  double endpoint_tol = 1e-6;
  double multiplicity_tol = 1e-7;
  ode::Tolerance ode_tol{1e-12, 1e-12};
};

/// Two Jacobi fields along gamma with xi(0) = 0 and xi'(0) equal to the unit
/// tangent and unit normal. State layout: (xi1, P1, xi2, P2) with
/// P = W xi' + <grad W, xi> gamma'.
class JacobiSystem {
 public:
  using State = ode::State<8>;

  explicit JacobiSystem(const GeodesicSampler& g) : g_(&g) {}

  State initial_state() const {
    const KeplerState st = g_->geodesic_state(0.0);
    const PlanePoint t = st.velocity / norm(st.velocity);
    const PlanePoint nrm = perp(t);
    const double w = KeplerWeight::value(st.position);
    return {0.0, 0.0, w * t.x, w * t.y, 0.0, 0.0, w * nrm.x, w * nrm.y};
  }

  void operator()(const State& x, State& dx, double s) const {
    const KeplerState st = g_->geodesic_state(s);
    const PlanePoint v = st.velocity;
    const double w = KeplerWeight::value(st.position);
    const PlanePoint gw = KeplerWeight::gradient(st.position);
    const SymMat2 hw = KeplerWeight::hessian(st.position);
    const double half_v2 = 0.5 * dot(v, v);
    for (int f = 0; f < 2; ++f) {
      const PlanePoint xi{x[4 * f], x[4 * f + 1]};
      const PlanePoint p{x[4 * f + 2], x[4 * f + 3]};
      const PlanePoint dxi = (p - v * dot(gw, xi)) / w;
      const PlanePoint dp = hw * xi * half_v2 + gw * dot(v, dxi);
      dx[4 * f] = dxi.x;
      dx[4 * f + 1] = dxi.y;
      dx[4 * f + 2] = dp.x;
      dx[4 * f + 3] = dp.y;
    }
  }

  static double determinant(const State& x) { return x[0] * x[5] - x[1] * x[4]; }

  /// Number of (numerically) vanishing singular values of [xi1 xi2].
  static int rank_deficiency(const State& x, double rel_tol) {
    const double a = x[0], b = x[4], c = x[1], d = x[5];
    const double s1 = a * a + b * b + c * c + d * d;
    const double det = std::abs(a * d - b * c);
    const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
    const double smax = std::sqrt(0.5 * (s1 + disc));
    const double smin = smax > 0.0 ? det / smax : 0.0;
    if (smax == 0.0) return 2;
    return smin <= rel_tol * smax ? 1 : 0;
  }

 private:
  const GeodesicSampler* g_;
};

/// Zeros of det[xi1(s), xi2(s)] on (0, s_end], located by a sign-change scan
/// and bisection.
inline std::vector<ConjugatePoint> jacobi_conjugate_points(const GeodesicSampler& g, const JacobiOptions& opt = {}) {
  JacobiSystem sys(g);
  JacobiSystem::State x = sys.initial_state();
  const double s_stop = opt.s_end + opt.overshoot;
  const int steps = std::max(8, static_cast<int>(std::ceil(opt.grid * s_stop)));
  const double ds = s_stop / steps;
  double dt = ds * 0.1;

  std::vector<ConjugatePoint> out;
  double s_prev = ds;
  ode::advance(sys, x, 0.0, s_prev, dt, opt.ode_tol);
  double det_prev = JacobiSystem::determinant(x);
  for (int k = 2; k <= steps; ++k) {
    const double s_next = k * ds;
    JacobiSystem::State y = x;
    ode::advance(sys, y, s_prev, s_next, dt, opt.ode_tol);
    const double det_next = JacobiSystem::determinant(y);
    if ((det_prev < 0.0) != (det_next < 0.0) || det_next == 0.0) {
      double lo = s_prev, hi = s_next;
      JacobiSystem::State at_lo = x;
      double det_lo = det_prev;
      JacobiSystem::State at_root = y;
      double dt_local = (hi - lo) * 0.25;
      while (hi - lo > opt.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        JacobiSystem::State z = at_lo;
        ode::advance(sys, z, lo, mid, dt_local, opt.ode_tol);
        const double det_mid = JacobiSystem::determinant(z);
        if ((det_mid < 0.0) == (det_lo < 0.0) && det_mid != 0.0) {
          lo = mid;
          at_lo = z;
          det_lo = det_mid;
        } else {
          hi = mid;
          at_root = z;
        }
      }
      const double s_root = 0.5 * (lo + hi);
      if (s_root <= opt.s_end + opt.endpoint_tol) {
        ConjugatePoint cp;
        cp.parameter = s_root;
        cp.multiplicity = std::max(1, JacobiSystem::rank_deficiency(at_root, opt.multiplicity_tol));
        cp.position = g.position(s_root);
        out.push_back(cp);
      }
    }
    x = y;
    s_prev = s_next;
    det_prev = det_next;
  }
  return out;
}

enum class Verdict { minimizer, non_minimizer, undecided_degenerate };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::minimizer: return "minimizer";
    case Verdict::non_minimizer: return "non-minimizer";
    case Verdict::undecided_degenerate: return "undecided-degenerate";
  }
  return "?";
}

inline Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::minimizer, Verdict::non_minimizer, Verdict::undecided_degenerate}) {
    if (to_string(v) == s) return v;
  }
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

/// Analytic minimality test in the symmetric frame. With f = (x_f, 0) the
/// second focus: if x_f < R cos phi0 the antipodal point lies on the arc iff
/// c_x < 0; if x_f > R cos phi0 iff c_x > 0. The arc minimizes iff it avoids
/// the antipodal point. x_f = R cos phi0 means p_f = q.
inline Verdict classify_analytic(const KeplerArc& arc, const Scenario& s) {
  if (arc.conjugate_degenerate || s.degenerate()) return Verdict::undecided_degenerate;
  const double xf = second_focus(arc.ellipse).x;
  const double ref = s.radius * std::cos(s.half_angle);
  if (std::abs(xf - ref) <= 1e-12) return Verdict::undecided_degenerate;
  const bool pf_on_arc = (xf < ref) ? arc.orientation < 0 : arc.orientation > 0;
  return pf_on_arc ? Verdict::non_minimizer : Verdict::minimizer;
}

struct AntipodalMembership {
  bool on_arc = false;
  PlanePoint point;
};

/// Antipodal point of the arc's start and whether it lies strictly inside the arc.
inline AntipodalMembership antipodal_membership(const KeplerArc& arc) {
  AntipodalMembership m;
  m.point = antipodal_point(arc.ellipse, arc.start());
  m.on_arc = arc.contains_angle(m.point.angle());
  return m;
}

/// J(eta) = int |eta'|^2 ds * int W(eta) ds, midpoint quadrature.
template <class Weight = KeplerWeight>
double maupertuis_J(const GeodesicPath& gp) {
  detail::check_path<Weight>(gp);
  const double h = gp.step();
  double kinetic = 0.0, potential = 0.0;
  for (int k = 0; k < gp.intervals(); ++k) {
    const PlanePoint d = gp.nodes[k + 1] - gp.nodes[k];
    kinetic += dot(d, d) / h;
    potential += h * Weight::value((gp.nodes[k] + gp.nodes[k + 1]) * 0.5);
  }
  return kinetic * potential;
}

template <class Weight = KeplerWeight>
std::vector<double> maupertuis_J_gradient(const GeodesicPath& gp) {
  detail::check_path<Weight>(gp);
  const int n = gp.intervals();
  const double h = gp.step();
  double kinetic = 0.0, potential = 0.0;
  std::vector<PlanePoint> dk(n + 1), dp(n + 1);
  for (int k = 0; k < n; ++k) {
    const PlanePoint d = gp.nodes[k + 1] - gp.nodes[k];
    const PlanePoint m = (gp.nodes[k] + gp.nodes[k + 1]) * 0.5;
    kinetic += dot(d, d) / h;
    potential += h * Weight::value(m);
    dk[k] -= d * (2.0 / h);
    dk[k + 1] += d * (2.0 / h);
    const PlanePoint gw = Weight::gradient(m) * (0.5 * h);
    dp[k] += gw;
    dp[k + 1] += gw;
  }
  std::vector<double> out;
  for (int i = 1; i < n; ++i) {
    const PlanePoint g = dk[i] * potential + dp[i] * kinetic;
    out.push_back(g.x);
    out.push_back(g.y);
  }
  return out;
}

struct MinimalityOptions {
  int intervals = 400;
  int max_intervals = 3200;
  double rel_threshold = 1e-8;
  double location_tol = 1e-6;
  JacobiOptions jacobi{};
};

/// Outcome of the three minimality tests on one arc.
struct MinimalityReport {
  std::string label;
  Verdict analytic = Verdict::minimizer;
  int morse_index = 0;
  double smallest_eigenvalue = 0.0;
  double eigen_threshold = 0.0;
  int mesh_intervals = 0;
  std::vector<ConjugatePoint> conjugate_points;  // interior of (0, 1) and the endpoint
  PlanePoint antipodal;
  bool antipodal_on_arc = false;
  double conjugate_antipodal_distance = -1.0;    // -1 when no interior conjugate point

  // agreement flags (all true for the degenerate scenario, where no claim is made)
  bool morse_agrees = true;          // minimizer <=> index 0
  bool jacobi_agrees = true;         // minimizer <=> no conjugate point in (0, 1)
  bool morse_theorem_holds = true;   // index == sum of multiplicities in (0, 1)
  bool geometry_agrees = true;       // minimizer <=> antipodal point off the arc
  bool conjugate_at_antipode = true; // |gamma(s*) - p_f| <= tol
  bool endpoint_conjugate = false;   // conjugate point at s = 1 (degenerate case)

  int interior_multiplicity() const {
    int m = 0;
    for (const auto& c : conjugate_points) {
      if (c.parameter < 1.0 - 1e-6) m += c.multiplicity;
    }
    return m;
  }
  bool all_agree() const {
    return morse_agrees && jacobi_agrees && morse_theorem_holds && geometry_agrees && conjugate_at_antipode;
  }
  bool operator==(const MinimalityReport&) const = default;
};

inline MinimalityReport analyze_arc(const KeplerArc& arc, const Scenario& s, const MinimalityOptions& opt = {}) {
  MinimalityReport rep;
  rep.label = arc.label.str();
  rep.analytic = classify_analytic(arc, s);

  const auto anti = antipodal_membership(arc);
  rep.antipodal = anti.point;
  rep.antipodal_on_arc = anti.on_arc;

  const GeodesicSampler g(time_parameterize(arc));
  const MorseIndex mi = morse_index_refined(g, opt.intervals, opt.max_intervals, opt.rel_threshold);
  rep.morse_index = mi.index;
  rep.smallest_eigenvalue = mi.smallest_eigenvalue;
  rep.eigen_threshold = mi.threshold;
  rep.mesh_intervals = mi.intervals;

  rep.conjugate_points = jacobi_conjugate_points(g, opt.jacobi);
  const int interior = rep.interior_multiplicity();
  for (const auto& c : rep.conjugate_points) {
    if (c.parameter < 1.0 - opt.jacobi.endpoint_tol) {
      const double dist = distance(c.position, rep.antipodal);
      rep.conjugate_antipodal_distance = std::max(rep.conjugate_antipodal_distance, dist);
    } else {
      rep.endpoint_conjugate = true;
    }
  }

  if (rep.analytic == Verdict::undecided_degenerate) return rep;
  const bool minimizer = rep.analytic == Verdict::minimizer;
  rep.morse_agrees = minimizer == (rep.morse_index == 0);
  rep.jacobi_agrees = minimizer == (interior == 0);
  rep.morse_theorem_holds = rep.morse_index == interior;
  rep.geometry_agrees = minimizer == !rep.antipodal_on_arc;
  rep.conjugate_at_antipode = rep.conjugate_antipodal_distance <= opt.location_tol;
  return rep;
}

}  // namespace kepler_arcs
