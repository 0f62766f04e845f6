#include "grushin/geoflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace grushin {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Quadrant-resolved angle in [0, 2 pi) from (sin, cos) values satisfying the
// generalized Pythagorean identity.
double quadrant_angle(const GenTrig& t, double s, double c) {
  if (s >= 0.0 && c >= 0.0) return t.arcsin(s);
  if (s >= 0.0) return t.half_period() - t.arcsin(s);
  if (c <= 0.0) return t.half_period() + t.arcsin(-s);
  return 2.0 * t.half_period() - t.arcsin(-s);
}

}  // namespace

double ipow(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

MultiIndex::MultiIndex(std::vector<int> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw std::invalid_argument("MultiIndex: n >= 1 required");
  for (int a : alpha_)
    if (a < 0) throw std::invalid_argument("MultiIndex: alpha_j >= 0 required");
}

std::vector<int> MultiIndex::nonzero() const {
  std::vector<int> j;
  for (int i = 0; i < n(); ++i)
    if (alpha_[i] != 0) j.push_back(i);
  return j;
}

bool MultiIndex::is_riemannian(std::span<const double> x) const {
  for (int i = 0; i < n(); ++i)
    if (alpha_[i] != 0 && x[i] == 0.0) return false;
  return true;
}

double xi(const MultiIndex& idx, std::span<const double> x, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= ipow(x[i], idx.alpha(i));
  return r;
}

double hamiltonian(const MultiIndex& idx, std::span<const double> x,
                   std::span<const double> p) {
  const int n = idx.n();
  if (static_cast<int>(x.size()) != n + 1 || static_cast<int>(p.size()) != n + 1)
    throw std::invalid_argument("hamiltonian: dimension mismatch");
  double xi2 = 1.0, h = 0.0;
  for (int j = 0; j <= n; ++j) {
    h += xi2 * p[j] * p[j];
    if (j < n) xi2 *= ipow(x[j] * x[j], idx.alpha(j));
  }
  return 0.5 * h;
}

Vec r_values(const MultiIndex& idx, std::span<const double> x,
             std::span<const double> p) {
  const int n = idx.n();
  Vec r(n + 2);
  r[n + 1] = 0.0;
  r[n] = std::fabs(p[n]);
  for (int j = n - 1; j >= 0; --j)
    r[j] = std::hypot(r[j + 1] * ipow(std::fabs(x[j]), idx.alpha(j)), p[j]);
  return r;
}

Vec spherical_to_covector(const MultiIndex& idx, const Vec& x0, const Vec& phi) {
  const int n = idx.n();
  if (static_cast<int>(x0.size()) != n + 1 || static_cast<int>(phi.size()) != n)
    throw std::invalid_argument("spherical_to_covector: dimension mismatch");
  if (!idx.is_riemannian(x0))
    throw std::invalid_argument("spherical_to_covector: base point is singular");
  Vec p(n + 1);
  double cum = 1.0;
  for (int j = 0; j < n; ++j) {
    const int a = idx.alpha(j);
    const int beta = a == 0 ? 1 : a;
    const double xh = a == 0 ? 1.0 : x0[j];
    const GenTrig& t = trig_alpha(beta);
    double s, c;
    t.sincos(phi[j], s, c);
    p[j] = c * cum;
    cum *= rho(beta, s / xh);
  }
  p[n] = cum;
  return p;
}

Vec covector_to_spherical(const MultiIndex& idx, const Vec& x0, const Vec& p0) {
  const int n = idx.n();
  if (static_cast<int>(x0.size()) != n + 1 || static_cast<int>(p0.size()) != n + 1)
    throw std::invalid_argument("covector_to_spherical: dimension mismatch");
  if (!idx.is_riemannian(x0))
    throw std::invalid_argument("covector_to_spherical: base point is singular");
  const double h = hamiltonian(idx, x0, p0);
  if (std::fabs(h - 0.5) > 1e-6)
    throw std::invalid_argument("covector_to_spherical: H(x0, p0) != 1/2");

  Vec phi(n, 0.0);
  double cum = 1.0;  // signed running product of deltas
  for (int j = 0; j < n; ++j) {
    if (cum == 0.0) break;  // degenerate face: remaining angles stay 0
    const int a = idx.alpha(j);
    const int beta = a == 0 ? 1 : a;
    const double xh = a == 0 ? 1.0 : x0[j];
    const GenTrig& t = trig_alpha(beta);
    if (std::fabs(p0[j]) > std::fabs(cum) * (1.0 + 1e-8))
      throw std::invalid_argument("covector_to_spherical: outside chart image");
    const double c = std::clamp(p0[j] / cum, -1.0, 1.0);
    if (j < n - 1) {
      const double smag =
          std::pow(std::clamp(1.0 - c * c, 0.0, 1.0), 0.5 / beta);
      phi[j] = c >= 0.0 ? t.arcsin(smag) : t.half_period() - t.arcsin(smag);
      cum *= rho(beta, smag / xh);
    } else {
      const double d = p0[n] / cum;
      double s = xh * sgn(d) * std::pow(std::fabs(d), 1.0 / beta);
      s = std::clamp(s, -1.0, 1.0);
      phi[j] = quadrant_angle(t, s, c);
    }
  }
  return phi;
}

GeodesicPath::GeodesicPath(MultiIndex idx, Vec x0, Vec p0,
                           std::vector<Coord> coords, Vec phi, Vec delta)
    : idx_(std::move(idx)),
      x0_(std::move(x0)),
      p0_(std::move(p0)),
      coords_(std::move(coords)),
      phi_(std::move(phi)),
      delta_(std::move(delta)) {
  const int n = idx_.n();
  if (static_cast<int>(x0_.size()) != n + 1 ||
      static_cast<int>(p0_.size()) != n + 1 ||
      static_cast<int>(coords_.size()) != n)
    throw std::invalid_argument("GeodesicPath: dimension mismatch");
  r_ = r_values(idx_, x0_, p0_);
  for (int j = 0; j < n; ++j) {
    Coord& c = coords_[j];
    if (c.branch == Branch::kTrig) {
      const int a = idx_.alpha(j);
      const GenTrig& t = trig_alpha(a);
      c.eta_phase = t.eta(c.phase);
      c.coeff = ipow(c.amplitude * c.amplitude, a) / (c.omega * (a + 1));
    }
  }
}

Vec GeodesicPath::integrals(double t) const {
  const int n = idx_.n();
  Vec I(n + 1);
  I[0] = t;
  for (int j = 1; j <= n; ++j) {
    const int k = j - 1;
    const int a = idx_.alpha(k);
    if (a == 0) {
      I[j] = I[j - 1];
    } else if (coords_[k].branch == Branch::kTrig) {
      const GenTrig& tr = trig_alpha(a);
      const Coord& c = coords_[k];
      I[j] = c.coeff * (tr.eta(c.omega * I[j - 1] + c.phase) - c.eta_phase);
    } else {
      // frozen linear coordinate, integrated in closed form
      const double u = I[j - 1];
      const double x = x0_[k], p = p0_[k];
      I[j] = p == 0.0 ? ipow(x * x, a) * u
                      : (ipow(x + p * u, 2 * a + 1) - ipow(x, 2 * a + 1)) /
                            (p * (2 * a + 1));
    }
  }
  return I;
}

double GeodesicPath::xi_integral(int j, double t) const {
  if (j < 0 || j > idx_.n())
    throw std::out_of_range("xi_integral: index out of range");
  return integrals(t)[j];
}

void GeodesicPath::eval_with(const Vec& I, Vec& x, Vec& p) const {
  const int n = idx_.n();
  x.resize(n + 1);
  p.resize(n + 1);
  for (int j = 0; j < n; ++j) {
    const Coord& c = coords_[j];
    if (c.branch == Branch::kTrig) {
      const GenTrig& t = trig_alpha(idx_.alpha(j));
      double s, co;
      t.sincos(c.omega * I[j] + c.phase, s, co);
      x[j] = c.amplitude * s;
      p[j] = c.amplitude * c.omega * co;
    } else {
      x[j] = x0_[j] + p0_[j] * I[j];
      p[j] = p0_[j];
    }
  }
  x[n] = x0_[n] + p0_[n] * I[n];
  p[n] = p0_[n];
}

void GeodesicPath::position_with(const Vec& I, Vec& x) const {
  const int n = idx_.n();
  x.resize(n + 1);
  for (int j = 0; j < n; ++j) {
    const Coord& c = coords_[j];
    if (c.branch == Branch::kTrig) {
      const GenTrig& t = trig_alpha(idx_.alpha(j));
      x[j] = c.amplitude * t.sin(c.omega * I[j] + c.phase);
    } else {
      x[j] = x0_[j] + p0_[j] * I[j];
    }
  }
  x[n] = x0_[n] + p0_[n] * I[n];
}

void GeodesicPath::eval(double t, Vec& x, Vec& p) const {
  if (t == 0.0) {  // empty integral: reproduce the initial data exactly
    x = x0_;
    p = p0_;
    return;
  }
  eval_with(integrals(t), x, p);
}

Vec GeodesicPath::position(double t) const {
  if (t == 0.0) return x0_;
  Vec x;
  position_with(integrals(t), x);
  return x;
}

GeodesicPath make_path_spherical(const MultiIndex& idx, const Vec& x0,
                                 const Vec& phi) {
  const int n = idx.n();
  if (static_cast<int>(phi.size()) != n)
    throw std::invalid_argument("make_path_spherical: phi size mismatch");
  if (!idx.is_riemannian(x0))
    throw std::invalid_argument("make_path_spherical: base point is singular");

  Vec p(n + 1), delta(n);
  std::vector<GeodesicPath::Coord> coords(n);
  Vec sines(n), cosines(n);
  double cum = 1.0;
  for (int j = 0; j < n; ++j) {
    const int a = idx.alpha(j);
    const int beta = a == 0 ? 1 : a;
    const double xh = a == 0 ? 1.0 : x0[j];
    const GenTrig& t = trig_alpha(beta);
    t.sincos(phi[j], sines[j], cosines[j]);
    p[j] = cosines[j] * cum;
    if (a != 0 && sines[j] != 0.0) {
      coords[j].omega = (sines[j] / x0[j]) * cum;
      coords[j].amplitude = x0[j] / sines[j];
      coords[j].phase = phi[j];
    }
    delta[j] = rho(beta, sines[j] / xh);
    cum *= delta[j];
  }
  p[n] = cum;

  const Vec r = r_values(idx, x0, p);
  for (int j = 0; j < n; ++j) {
    const bool trig_branch = r[j + 1] != 0.0 && idx.alpha(j) >= 1;
    coords[j].branch = trig_branch ? Branch::kTrig : Branch::kLinear;
  }
  return GeodesicPath(idx, x0, p, std::move(coords), phi, std::move(delta));
}

GeodesicPath make_path_covector(const MultiIndex& idx, const Vec& x0,
                                const Vec& p0) {
  return make_path_spherical(idx, x0, covector_to_spherical(idx, x0, p0));
}

GeodesicPath embed(const GeodesicPath& path, int alpha_new, double x_extra) {
  if (alpha_new < 0) throw std::invalid_argument("embed: alpha_new >= 0");
  std::vector<int> alpha = path.index().exponents();
  const int n = static_cast<int>(alpha.size());
  alpha.push_back(alpha_new);
  Vec x0 = path.base();
  Vec p0 = path.covector();
  x0.push_back(x_extra);
  p0.push_back(0.0);
  std::vector<GeodesicPath::Coord> coords(n + 1);
  for (int j = 0; j < n; ++j) {
    coords[j].branch = path.branch(j);
    coords[j].amplitude = path.amplitude(j);
    coords[j].omega = path.omega(j);
    coords[j].phase = path.phase(j);
  }
  // the old last coordinate keeps its linear evolution: R_{n+1} = |p_new| = 0
  coords[n].branch = Branch::kLinear;
  return GeodesicPath(MultiIndex(std::move(alpha)), std::move(x0), std::move(p0),
                      std::move(coords), {}, {});
}

}  // namespace grushin
