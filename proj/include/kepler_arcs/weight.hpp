// Conformal weight W of the Jacobi metric g(x)[u, v] = W(x) <u, v>.
#pragma once

#include <cmath>

#include "kepler_arcs/geometry.hpp"

namespace kepler_arcs {

/// Symmetric 2x2 matrix.
struct SymMat2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  PlanePoint operator*(PlanePoint v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
  double quad(PlanePoint v) const { return dot(v, (*this) * v); }
};

/// W(x) = 1/|x| - 1 on the normalized Hill's region.
struct KeplerWeight {
  static double value(PlanePoint x) { return 1.0 / x.radius() - 1.0; }

  /// grad W = -x / |x|^3
  static PlanePoint gradient(PlanePoint x) {
    const double r = x.radius();
    return x * (-1.0 / (r * r * r));
  }

  /// Hess W = (3 x x^T - |x|^2 Id) / |x|^5
  static SymMat2 hessian(PlanePoint x) {
    const double r2 = dot(x, x);
    const double r5 = r2 * r2 * std::sqrt(r2);
    return {(3.0 * x.x * x.x - r2) / r5, 3.0 * x.x * x.y / r5, (3.0 * x.y * x.y - r2) / r5};
  }
};

/// Flat metric: geodesics are straight segments. Used to exercise the
/// variational machinery where everything is known in closed form.
struct ConstantWeight {
  static double value(PlanePoint) { return 1.0; }
  static PlanePoint gradient(PlanePoint) { return {0.0, 0.0}; }
  static SymMat2 hessian(PlanePoint) { return {}; }
};

}  // namespace kepler_arcs
