#include "grushin/gentrig.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace grushin {

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

TrigParams::TrigParams(double a_, double b_) : a(a_), b(b_) {
  if (!(a >= 1.0) || !(b >= 1.0))
    throw std::domain_error("TrigParams: require a >= 1 and b >= 1");
}

double rho(double theta, double x) {
  if (!(theta >= 1.0)) throw std::domain_error("rho: require theta >= 1");
  if (x == 0.0 || theta == 1.0) return x;
  return std::pow(std::fabs(x), theta - 1.0) * x;
}

GenTrig::GenTrig(TrigParams p) : p_(p) {
  // pi_{a,b} = 2 F_{a,b}(1) = (2/a) B(1/a, 1 - 1/b), in extended precision so
  // the compensated argument reduction keeps a usable low word.
  const long double ia = 1.0L / static_cast<long double>(p_.a);
  const long double ib = 1.0L / static_cast<long double>(p_.b);
  const long double lpi = 2.0L * expl(lgammal(1.0L + ia) + lgammal(1.0L - ib) -
                                      lgammal(1.0L + ia - ib));
  pi_ = static_cast<double>(lpi);
  pi_lo_ = std::isfinite(pi_) ? static_cast<double>(lpi - static_cast<long double>(pi_)) : 0.0;
  bfull_ = std::exp(std::lgamma(1.0 / p_.a) + std::lgamma(1.0 - 1.0 / p_.b) -
                    std::lgamma(1.0 / p_.a + 1.0 - 1.0 / p_.b));

  if (p_.b == 2.0 && std::isfinite(pi_)) {
    const int n = 4096;
    tab_dx_ = 0.5 * pi_ / n;
    tab_y_.resize(n + 1);
    tab_d_.resize(n + 1);
    tab_y_[0] = 0.0;
    tab_d_[0] = 1.0;
    for (int i = 1; i < n; ++i) {
      // march with the extrapolated guess from the previous node
      const double guess = std::clamp(tab_y_[i - 1] + tab_d_[i - 1] * tab_dx_, 0.0, 1.0);
      const double y = newton_invert(i * tab_dx_, guess);
      tab_y_[i] = y;
      tab_d_[i] = y > 0.0 ? std::pow(-std::expm1(p_.a * std::log(y)), 1.0 / p_.b) : 1.0;
    }
    tab_y_[n] = 1.0;
    tab_d_[n] = 0.0;
  }
}

// Bracketed safeguarded Newton on F(y) - s over [0, 1] with bisection
// fallback whenever a step leaves the current bracket.
double GenTrig::newton_invert(double s, double y) const {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double f = forward(y) - s;
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = y;
    const double slope =
        y > 0.0 ? std::pow(-std::expm1(p_.a * std::log(y)), 1.0 / p_.b) : 1.0;
    double ynew = y - f * slope;
    if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
    const bool done = std::fabs(ynew - y) <= 1e-15 * (1.0 + std::fabs(y));
    y = ynew;
    if (done) break;
  }
  return y;
}

double GenTrig::forward(double x) const {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("forward: argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 0.5 * pi_;
  const double p = 1.0 / p_.a;
  const double q = 1.0 - 1.0 / p_.b;
  const double z = std::pow(x, p_.a);
  const double omz = -std::expm1(p_.a * std::log(x));  // 1 - x^a, stable near 1
  double bz;
  if (z < (p + 1.0) / (p + q + 2.0) || !(q > 0.0)) {
    // B_z(p, q) with z^p = x taken exactly
    bz = x * std::pow(omz, q) / p * betacf(p, q, z);
  } else {
    bz = bfull_ - std::pow(omz, q) * x / q * betacf(q, p, omz);
  }
  return bz / p_.a;
}

double GenTrig::invert(double s, bool use_table) const {
  if (s <= 0.0) return 0.0;
  const double half = 0.5 * pi_;
  if (s >= half) return 1.0;
  double y;
  if (use_table && !tab_y_.empty()) {
    const double u = s / tab_dx_;
    const int i = std::min(static_cast<int>(u), static_cast<int>(tab_y_.size()) - 2);
    const double tl = u - i;
    const double t2 = tl * tl, t3 = t2 * tl;
    const double m0 = tab_d_[i] * tab_dx_, m1 = tab_d_[i + 1] * tab_dx_;
    y = (2 * t3 - 3 * t2 + 1) * tab_y_[i] + (t3 - 2 * t2 + tl) * m0 +
        (-2 * t3 + 3 * t2) * tab_y_[i + 1] + (t3 - t2) * m1;
    y = std::clamp(y, 0.0, 1.0);
  } else {
    y = std::isfinite(half) ? std::clamp(s / half, 0.0, 1.0) : std::fmin(s, 0.5);
  }
  return newton_invert(s, y);
}

double GenTrig::reduce(double x) const {
  const double period = 2.0 * pi_;
  if (x >= 0.0 && x < period) return x;
  const double k = std::floor(x / period);
  double r = std::fma(-k, period, x) - k * (2.0 * pi_lo_);
  while (r < 0.0) r += period;
  while (r >= period) r -= period;
  return r;
}

double GenTrig::cos_mag(double s) const {
  if (s >= 1.0) return 0.0;
  if (s <= 0.0) return 1.0;
  return std::pow(-std::expm1(p_.a * std::log(s)), 1.0 / p_.b);
}

void GenTrig::sincos(double x, double& s, double& c) const {
  if (!std::isfinite(pi_)) {
    // infinite half period (b == 1): no reduction, principal branch only
    const double m = invert(std::fabs(x), false);
    s = x < 0.0 ? -m : m;
    c = cos_mag(m);
    return;
  }
  const double r = reduce(x);
  const double half = 0.5 * pi_;
  // exact values on the quarter-period lattice (both common spellings of 3pi/2)
  if (r == 0.0) { s = 0.0; c = 1.0; return; }
  if (r == half) { s = 1.0; c = 0.0; return; }
  if (r == pi_) { s = 0.0; c = -1.0; return; }
  if (r == pi_ + half || r == 1.5 * pi_) { s = -1.0; c = 0.0; return; }
  if (r < half) {
    s = invert(r, true);
    c = cos_mag(s);
  } else if (r < pi_) {
    s = invert(pi_ - r, true);
    c = -cos_mag(s);
  } else if (r < pi_ + half) {
    s = -invert(r - pi_, true);
    c = -cos_mag(-s);
  } else {
    s = -invert(2.0 * pi_ - r, true);
    c = cos_mag(-s);
  }
}

double GenTrig::sin(double x) const {
  double s, c;
  sincos(x, s, c);
  return s;
}

double GenTrig::cos(double x) const {
  double s, c;
  sincos(x, s, c);
  return c;
}

double GenTrig::tan(double x) const {
  double s, c;
  sincos(x, s, c);
  return s / c;
}

double GenTrig::arcsin(double y) const {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::domain_error("arcsin: argument outside [0, 1]");
  return forward(y);
}

double GenTrig::eta(double x) const {
  double s, c;
  sincos(x, s, c);
  return x - s * c;
}

const GenTrig& trig(TrigParams p) {
  static std::mutex mu;
  static std::map<TrigParams, std::unique_ptr<GenTrig>>* cache =
      new std::map<TrigParams, std::unique_ptr<GenTrig>>();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache->find(p);
  if (it == cache->end())
    it = cache->emplace(p, std::make_unique<GenTrig>(p)).first;
  return *it->second;
}

const GenTrig& trig_alpha(int alpha) {
  if (alpha < 1) throw std::domain_error("trig_alpha: require alpha >= 1");
  return trig(TrigParams(2.0 * alpha, 2.0));
}

double half_period(TrigParams p) { return trig(p).half_period(); }
double forward(TrigParams p, double x) { return trig(p).forward(x); }
double gsin(TrigParams p, double x) { return trig(p).sin(x); }
double gcos(TrigParams p, double x) { return trig(p).cos(x); }

double eta(double beta, double x) { return trig(TrigParams(2.0 * beta, 2.0)).eta(x); }

double garcsin(double beta, double y) {
  return trig(TrigParams(2.0 * beta, 2.0)).arcsin(y);
}

}  // namespace grushin
