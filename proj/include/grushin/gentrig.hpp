#pragma once

#include <vector>

namespace grushin {

// Parameters (a, b) of the generalized trigonometric family built from
// F_{a,b}(x) = \int_0^x (1 - t^a)^{-1/b} dt. Both exponents must be >= 1.
// The Grushin specialization is sin_alpha = sin_{2 alpha, 2}.
struct TrigParams {
  double a;
  double b;
  TrigParams(double a_, double b_);
  bool operator<(const TrigParams& o) const {
    return a < o.a || (a == o.a && b < o.b);
  }
};

// x |-> |x|^{theta-1} x, odd and increasing for theta >= 1.
double rho(double theta, double x);

// One (a, b) family: half period, the forward integral F_{a,b}, its inverse
// extended to the real line by reflection, oddness and 2 pi_{a,b} periodicity,
// the derivative cos_{a,b}, and the primitive eta(x) = x - sin(x) cos(x).
//
// Immutable after construction; all evaluation methods are const and safe to
// call concurrently.
class GenTrig {
 public:
  explicit GenTrig(TrigParams p);

  const TrigParams& params() const { return p_; }
  double half_period() const { return pi_; }
  double quarter_period() const { return 0.5 * pi_; }

  // F_{a,b}(x) for x in [0, 1]; throws std::domain_error outside.
  double forward(double x) const;

  double sin(double x) const;
  double cos(double x) const;
  // Evaluates both with a single inversion.
  void sincos(double x, double& s, double& c) const;
  double tan(double x) const;

  // Principal inverse of sin on [0, 1] -> [0, pi/2]; equals forward(y).
  double arcsin(double y) const;

  // eta(x) = x - sin(x) cos(x); derivative (for a = 2 beta, b = 2) is
  // (beta + 1) sin^{2 beta}.
  double eta(double x) const;

 private:
  double newton_invert(double s, double y0) const;
  double invert(double s, bool use_table) const;
  double reduce(double x) const;  // into [0, 2 pi)
  double cos_mag(double s) const;

  TrigParams p_;
  double pi_ = 0.0;      // half period pi_{a,b}
  double pi_lo_ = 0.0;   // low word of the half period
  double bfull_ = 0.0;   // complete Beta(1/a, 1 - 1/b)
  // Cubic-Hermite table of F^{-1} on [0, pi/2], built for b == 2; supplies
  // the initial guess for the safeguarded Newton inversion.
  std::vector<double> tab_y_, tab_d_;
  double tab_dx_ = 0.0;
};

// Process-wide cache of GenTrig instances keyed by (a, b). Initialization and
// reads are thread safe; returned references stay valid for the process
// lifetime.
const GenTrig& trig(TrigParams p);
// sin_alpha family: (2 alpha, 2).
const GenTrig& trig_alpha(int alpha);

// Free-function surface over the cache.
double half_period(TrigParams p);
double forward(TrigParams p, double x);
double gsin(TrigParams p, double x);
double gcos(TrigParams p, double x);
// eta_beta with beta >= 1 (family (2 beta, 2)).
double eta(double beta, double x);
// Principal inverse on [0, 1], beta >= 1.
double garcsin(double beta, double y);

}  // namespace grushin
