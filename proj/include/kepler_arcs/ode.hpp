// Thin wrapper over Boost.Odeint: adaptive Runge-Kutta-Fehlberg 7(8)
// stepping with an explicit step-size floor.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace kepler_arcs::ode {

class StepUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerance {
  double absolute = 1e-12;
  double relative = 1e-12;
};

template <std::size_t N>
using State = std::array<double, N>;

/// Advances `x` from t0 to t1 (t1 >= t0). `dt` carries the step-size hint
/// across calls and is updated to the last accepted step.
template <std::size_t N, class System>
void advance(System&& system, State<N>& x, double t0, double t1, double& dt, Tolerance tol = {},
             double min_step = 1e-15) {
  namespace odeint = boost::numeric::odeint;
  if (t1 < t0) throw std::invalid_argument("ode::advance: integration must run forward");
  if (t1 == t0) return;
  auto stepper = odeint::make_controlled(tol.absolute, tol.relative, odeint::runge_kutta_fehlberg78<State<N>>());
  double t = t0;
  if (!(dt > 0.0)) dt = (t1 - t0) * 1e-2;
  const double span = t1 - t0;
  while (t < t1) {
    double h = std::min(dt, t1 - t);
    const bool last = (h == t1 - t);
    const auto res = stepper.try_step(system, x, t, h);
    if (res == odeint::success) {
      // try_step advanced t and suggested the next step in h
      if (last) {
        t = t1;
        dt = std::max(dt, h);
      } else {
        dt = h;
      }
    } else {
      dt = h;
      if (dt < min_step * std::max(1.0, span)) throw StepUnderflow("ode::advance: step size underflow");
    }
  }
}

}  // namespace kepler_arcs::ode
