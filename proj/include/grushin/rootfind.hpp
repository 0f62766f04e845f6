#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace grushin {

// Brent's method on a bracketing interval [a, b] with f(a)*f(b) <= 0.
// Combines bisection, secant and inverse quadratic interpolation; always
// keeps a valid bracket. tol is an absolute tolerance on the argument.
template <class F>
double brent(F&& f, double a, double b, double tol, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("brent: root not bracketed");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::fmin(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d; d = p / q;
      } else {
        d = xm; e = d;
      }
    } else {
      d = xm; e = d;
    }
    a = b; fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = b - a; e = d; }
  }
  return b;
}

// Solves f(t) = 0 for nondecreasing f with f(0) <= 0 by doubling an upper
// bound until the sign changes, then Brent. Returns +infinity if no sign
// change is found below t_limit.
template <class F>
double monotone_root(F&& f, double t_seed, double rel_tol, double t_limit = 1e15) {
  double lo = 0.0, hi = std::fmax(t_seed, 1e-8);
  double fhi = f(hi);
  while (fhi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > t_limit) return std::numeric_limits<double>::infinity();
    fhi = f(hi);
  }
  if (fhi == 0.0) return hi;
  return brent(f, lo, hi, rel_tol * std::fmax(1.0, hi));
}

}  // namespace grushin
