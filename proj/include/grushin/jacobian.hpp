#pragma once

#include <vector>

#include "grushin/geoflow.hpp"

namespace grushin {

// Factorized Jacobian determinant of the exponential map in (t, phi)
// coordinates: D(t, phi) = g(phi) * prod_j S_j.
struct JacobianFactors {
  std::vector<double> s;  // S_0..S_{n-1}
  std::vector<double> q;  // phases Q_j for j in J (NaN elsewhere)
  double gphi = 0.0;
  double determinant = 0.0;
};

// Q_j = omega_j I_j(t) + phi_j, for j in J on the trig branch.
double phase(const GeodesicPath& path, int j, double t);

// S_j factor: the displayed cot-form for j in J (evaluated jointly as
// (cos Q (cos phi * omega I + sin phi) - cos phi * sin Q) / sin phi, which
// reduces to cos(Q) exactly at quarter-period phases), and I_j(t) for j not
// in J.
double s_factor(const GeodesicPath& path, int j, double t);

// All factors and the product. Requires a chart-born path with phi in the
// interior R^0 (throws on chart-boundary degeneracy).
JacobianFactors det_spherical(const GeodesicPath& path, double t);

// Central-difference Jacobian determinant of (t, phi) -> exp_{x0}(t p0(phi)),
// via pivoted LU. Independent oracle for the factorization.
double det_fd(const MultiIndex& idx, const Vec& x0, const Vec& phi, double t,
              double step_scale = 1e-5);

// n = 2 only: D(t, phi) divided by the (t, phi) -> (u0, v0, w0) volume factor
// t^2 alpha beta sin_alpha^{2 alpha - 1}(phi_1) |sin_beta(phi_2)|^{beta - 1}
//   / (x0^{2 alpha} |y0|^beta).
double det_cartesian_3d(const GeodesicPath& path, double t);

// First t > 0 with some S_j = 0. Returns tau when the quarter-period equality
// condition holds, +infinity for straight-line covectors or when no zero is
// found below horizon_mult * tau.
double first_conjugate_time(const GeodesicPath& path, double horizon_mult = 10.0);

}  // namespace grushin
