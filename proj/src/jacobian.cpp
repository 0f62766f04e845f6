#include "grushin/jacobian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/rootfind.hpp"
#include "grushin/synthesis.hpp"

namespace grushin {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double s_factor_with(const GeodesicPath& path, int j, const Vec& I) {
  const MultiIndex& idx = path.index();
  if (!idx.in_j(j)) return I[j];
  if (path.branch(j) != Branch::kTrig)
    throw std::domain_error("s_factor: phi_j on the chart boundary");
  const int a = idx.alpha(j);
  const GenTrig& t = trig_alpha(a);
  double s0, c0;
  t.sincos(path.phase(j), s0, c0);
  const double wi = path.omega(j) * I[j];
  double sq, cq;
  t.sincos(wi + path.phase(j), sq, cq);
  return (cq * (c0 * wi + s0) - c0 * sq) / s0;
}

// pivoted LU determinant, in place
double lu_det(std::vector<Vec>& m) {
  const int n = static_cast<int>(m.size());
  double det = 1.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m[i][k]) > std::fabs(m[piv][k])) piv = i;
    if (piv != k) {
      std::swap(m[piv], m[k]);
      det = -det;
    }
    if (m[k][k] == 0.0) return 0.0;
    det *= m[k][k];
    for (int i = k + 1; i < n; ++i) {
      const double f = m[i][k] / m[k][k];
      for (int c = k; c < n; ++c) m[i][c] -= f * m[k][c];
    }
  }
  return det;
}

}  // namespace

double phase(const GeodesicPath& path, int j, double t) {
  if (!path.index().in_j(j)) throw std::domain_error("phase: j not in J");
  if (path.branch(j) != Branch::kTrig)
    throw std::domain_error("phase: coordinate on the linear branch");
  return path.omega(j) * path.xi_integral(j, t) + path.phase(j);
}

double s_factor(const GeodesicPath& path, int j, double t) {
  if (j < 0 || j >= path.index().n())
    throw std::out_of_range("s_factor: index out of range");
  return s_factor_with(path, j, path.integrals(t));
}

JacobianFactors det_spherical(const GeodesicPath& path, double t) {
  const MultiIndex& idx = path.index();
  const int n = idx.n();
  if (!path.chart_born())
    throw std::domain_error("det_spherical: path not in the spherical chart");
  for (int j = 0; j < n; ++j)
    if (path.delta(j) == 0.0)
      throw std::domain_error("det_spherical: phi on the chart boundary");

  JacobianFactors f;
  f.s.resize(n);
  f.q.assign(n, kNan);
  const Vec I = path.integrals(t);
  for (int j = 0; j < n; ++j) {
    f.s[j] = s_factor_with(path, j, I);
    if (idx.in_j(j)) f.q[j] = path.omega(j) * I[j] + path.phase(j);
  }

  // g(phi) = (-1)^{|J|} (prod_{k not in J} prod_{i<k} delta_i)
  //          prod_{j in J} |x0_j / sin(phi_j)|^{alpha_j + 1}
  double g = 1.0, cum = 1.0;
  int jcount = 0;
  for (int k = 0; k < n; ++k) {
    if (idx.alpha(k) == 0) {
      g *= cum;
    } else {
      ++jcount;
      g *= std::pow(std::fabs(path.amplitude(k)), idx.alpha(k) + 1);
    }
    cum *= path.delta(k);
  }
  if (jcount & 1) g = -g;
  f.gphi = g;
  f.determinant = g;
  for (int j = 0; j < n; ++j) f.determinant *= f.s[j];
  return f;
}

double det_fd(const MultiIndex& idx, const Vec& x0, const Vec& phi, double t,
              double step_scale) {
  const int n = idx.n();
  const int dim = n + 1;
  std::vector<Vec> m(dim, Vec(dim));
  // column 0: d/dt; columns 1..n: d/dphi_k
  for (int c = 0; c < dim; ++c) {
    Vec lo(dim), hi(dim);
    if (c == 0) {
      const double h = step_scale * std::fmax(1.0, std::fabs(t));
      const GeodesicPath path = make_path_spherical(idx, x0, phi);
      hi = path.position(t + h);
      lo = path.position(t - h);
      for (int r = 0; r < dim; ++r) m[r][c] = (hi[r] - lo[r]) / (2.0 * h);
    } else {
      Vec ph = phi, pl = phi;
      const double h = step_scale * std::fmax(1.0, std::fabs(phi[c - 1]));
      ph[c - 1] += h;
      pl[c - 1] -= h;
      hi = make_path_spherical(idx, x0, ph).position(t);
      lo = make_path_spherical(idx, x0, pl).position(t);
      for (int r = 0; r < dim; ++r) m[r][c] = (hi[r] - lo[r]) / (2.0 * h);
    }
  }
  return lu_det(m);
}

double det_cartesian_3d(const GeodesicPath& path, double t) {
  const MultiIndex& idx = path.index();
  if (idx.n() != 2) throw std::domain_error("det_cartesian_3d: n = 2 only");
  if (!(t > 0.0)) throw std::domain_error("det_cartesian_3d: t > 0 required");
  const int a = idx.alpha(0), b = idx.alpha(1);
  const GenTrig& ta = trig_alpha(a);
  const GenTrig& tb = trig_alpha(b);
  const double s1 = ta.sin(path.phase(0));
  const double s2 = tb.sin(path.phase(1));
  const double x0 = path.base()[0], y0 = path.base()[1];
  const double vol = t * t * a * b * ipow(s1, 2 * a - 1) *
                     std::pow(std::fabs(s2), b - 1) /
                     (ipow(x0 * x0, a) * std::pow(std::fabs(y0), b));
  return det_spherical(path, t).determinant / vol;
}

double first_conjugate_time(const GeodesicPath& path, double horizon_mult) {
  const CutReport rep = cut_report(path);
  if (std::isinf(rep.tau)) return kInf;
  if (rep.conjugate_at_tau) return rep.tau;

  const MultiIndex& idx = path.index();
  std::vector<int> scan;
  for (int j : idx.nonzero())
    if (path.branch(j) == Branch::kTrig) scan.push_back(j);

  const double step = rep.tau / 50.0;
  const double horizon = horizon_mult * rep.tau;
  Vec prev(scan.size());
  {
    const Vec I = path.integrals(rep.tau);
    for (size_t i = 0; i < scan.size(); ++i) prev[i] = s_factor_with(path, scan[i], I);
  }
  double best = kInf;
  for (double t = rep.tau + step; t <= horizon + 0.5 * step; t += step) {
    const Vec I = path.integrals(std::fmin(t, horizon));
    for (size_t i = 0; i < scan.size(); ++i) {
      const double v = s_factor_with(path, scan[i], I);
      if (prev[i] == 0.0) {
        best = std::fmin(best, t - step);
      } else if (v == 0.0 || (v > 0.0) != (prev[i] > 0.0)) {
        const int j = scan[i];
        const double root = brent(
            [&](double tt) { return s_factor(path, j, tt); }, t - step,
            std::fmin(t, horizon), 1e-12);
        best = std::fmin(best, root);
      }
      prev[i] = v;
    }
    if (std::isfinite(best)) break;
  }
  return best;
}

}  // namespace grushin
