#include "grushin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/rootfind.hpp"

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Right-hand side of Hamilton's equations in the gradient form
//   x_j' = xi_j^2 p_j
//   p_i' = -alpha_i x_i^{2 alpha_i - 1} xi_i^2 sum_{j>i} p_j^2 prod_{i<k<j} x_k^{2 alpha_k}
void rhs(const MultiIndex& idx, const Vec& y, Vec& dy) {
  const int n = idx.n();
  const double* x = y.data();
  const double* p = y.data() + n + 1;
  dy.resize(2 * (n + 1));

  Vec pk(n), prefix(n + 2);  // pk[i] = x_i^{2 alpha_i}, prefix[j] = xi_j^2
  prefix[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    pk[i] = ipow(x[i] * x[i], idx.alpha(i));
    prefix[i + 1] = prefix[i] * pk[i];
  }
  for (int j = 0; j <= n; ++j) dy[j] = prefix[j] * p[j];

  // T_i = sum_{j>i} p_j^2 prod_{i<k<j} x_k^{2 alpha_k}, backward recursion
  double t_acc = 0.0;
  Vec tail(n);
  for (int i = n - 1; i >= 0; --i) {
    t_acc = p[i + 1] * p[i + 1] + (i + 1 < n ? pk[i + 1] * t_acc : 0.0);
    tail[i] = t_acc;
  }
  for (int i = 0; i < n; ++i) {
    const int a = idx.alpha(i);
    dy[n + 1 + i] =
        a == 0 ? 0.0 : -a * ipow(x[i], 2 * a - 1) * prefix[i] * tail[i];
  }
  dy[2 * n + 1] = 0.0;
}

struct Dp45 {
  // Dormand-Prince 5(4) with FSAL
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

// One adaptive step from (t, y) with suggested size h (not past t_end).
// Returns the accepted step size; updates t, y, k1 (FSAL) in place.
double dp45_step(const MultiIndex& idx, double& t, Vec& y, Vec& k1, double& h,
                 double t_end, double tol) {
  const int m = static_cast<int>(y.size());
  Vec k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), yt(m), y5(m);
  for (;;) {
    const double hs = std::fmin(h, t_end - t);
    for (int i = 0; i < m; ++i) yt[i] = y[i] + hs * Dp45::a21 * k1[i];
    rhs(idx, yt, k2);
    for (int i = 0; i < m; ++i)
      yt[i] = y[i] + hs * (Dp45::a31 * k1[i] + Dp45::a32 * k2[i]);
    rhs(idx, yt, k3);
    for (int i = 0; i < m; ++i)
      yt[i] = y[i] + hs * (Dp45::a41 * k1[i] + Dp45::a42 * k2[i] + Dp45::a43 * k3[i]);
    rhs(idx, yt, k4);
    for (int i = 0; i < m; ++i)
      yt[i] = y[i] + hs * (Dp45::a51 * k1[i] + Dp45::a52 * k2[i] +
                           Dp45::a53 * k3[i] + Dp45::a54 * k4[i]);
    rhs(idx, yt, k5);
    for (int i = 0; i < m; ++i)
      yt[i] = y[i] + hs * (Dp45::a61 * k1[i] + Dp45::a62 * k2[i] + Dp45::a63 * k3[i] +
                           Dp45::a64 * k4[i] + Dp45::a65 * k5[i]);
    rhs(idx, yt, k6);
    for (int i = 0; i < m; ++i)
      y5[i] = y[i] + hs * (Dp45::b1 * k1[i] + Dp45::b3 * k3[i] + Dp45::b4 * k4[i] +
                           Dp45::b5 * k5[i] + Dp45::b6 * k6[i]);
    rhs(idx, y5, k7);
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      const double e = hs * (Dp45::e1 * k1[i] + Dp45::e3 * k3[i] + Dp45::e4 * k4[i] +
                             Dp45::e5 * k5[i] + Dp45::e6 * k6[i] + Dp45::e7 * k7[i]);
      const double sc = tol * (1.0 + std::fabs(y[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / m);
    if (err <= 1.0 || hs <= 1e-14 * std::fmax(1.0, std::fabs(t))) {
      t += hs;
      y = y5;
      k1 = k7;
      const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
      h = hs * fac;
      if (hs <= 1e-14 * std::fmax(1.0, std::fabs(t)))
        throw std::runtime_error("integrate_hamilton: step-size underflow");
      return hs;
    }
    h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
  }
}

void rk4_step(const MultiIndex& idx, double& t, Vec& y, double h) {
  const int m = static_cast<int>(y.size());
  Vec k1(m), k2(m), k3(m), k4(m), yt(m);
  rhs(idx, y, k1);
  for (int i = 0; i < m; ++i) yt[i] = y[i] + 0.5 * h * k1[i];
  rhs(idx, yt, k2);
  for (int i = 0; i < m; ++i) yt[i] = y[i] + 0.5 * h * k2[i];
  rhs(idx, yt, k3);
  for (int i = 0; i < m; ++i) yt[i] = y[i] + h * k3[i];
  rhs(idx, yt, k4);
  for (int i = 0; i < m; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  t += h;
}

}  // namespace

void Trajectory::sample(double ts, Vec& x, Vec& p) const {
  const auto it = std::upper_bound(t.begin(), t.end(), ts);
  int i = static_cast<int>(it - t.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(t.size()) - 2);
  const double h = t[i + 1] - t[i];
  const double u = std::clamp((ts - t[i]) / h, 0.0, 1.0);
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  x.resize(dim);
  p.resize(dim);
  for (int c = 0; c < 2 * dim; ++c) {
    const double v = h00 * y[i][c] + h10 * h * dy[i][c] + h01 * y[i + 1][c] +
                     h11 * h * dy[i + 1][c];
    (c < dim ? x[c] : p[c - dim]) = v;
  }
}

Trajectory integrate_hamilton(const MultiIndex& idx, const Vec& x0, const Vec& p0,
                              const IntegratorConfig& cfg) {
  const int n = idx.n();
  if (static_cast<int>(x0.size()) != n + 1 || static_cast<int>(p0.size()) != n + 1)
    throw std::invalid_argument("integrate_hamilton: dimension mismatch");
  Trajectory tr;
  tr.dim = n + 1;
  Vec y(2 * (n + 1));
  std::copy(x0.begin(), x0.end(), y.begin());
  std::copy(p0.begin(), p0.end(), y.begin() + n + 1);
  const double h0 = hamiltonian(idx, x0, p0);

  double t = 0.0;
  Vec k1;
  rhs(idx, y, k1);
  tr.t.push_back(t);
  tr.y.push_back(y);
  tr.dy.push_back(k1);

  if (cfg.method == IntegratorConfig::Method::kRK4) {
    const int steps = static_cast<int>(std::ceil(cfg.t_max / cfg.step));
    const double h = cfg.t_max / steps;
    for (int s = 0; s < steps; ++s) {
      rk4_step(idx, t, y, h);
      rhs(idx, y, k1);
      tr.t.push_back(t);
      tr.y.push_back(y);
      tr.dy.push_back(k1);
      tr.h_drift = std::fmax(
          tr.h_drift,
          std::fabs(hamiltonian(idx, {y.begin(), y.begin() + n + 1},
                                {y.begin() + n + 1, y.end()}) -
                    h0));
    }
  } else {
    double h = std::fmin(0.01, cfg.t_max);
    while (t < cfg.t_max * (1.0 - 1e-15)) {
      dp45_step(idx, t, y, k1, h, cfg.t_max, cfg.tol);
      tr.t.push_back(t);
      tr.y.push_back(y);
      tr.dy.push_back(k1);
      tr.h_drift = std::fmax(
          tr.h_drift,
          std::fabs(hamiltonian(idx, {y.begin(), y.begin() + n + 1},
                                {y.begin() + n + 1, y.end()}) -
                    h0));
    }
  }
  return tr;
}

double closed_form_residual(const GeodesicPath& path,
                            const std::vector<double>& t_grid,
                            const IntegratorConfig& cfg) {
  const MultiIndex& idx = path.index();
  const int n = idx.n();
  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end());

  // step exactly onto every requested time so no interpolation enters
  Vec y(2 * (n + 1));
  std::copy(path.base().begin(), path.base().end(), y.begin());
  std::copy(path.covector().begin(), path.covector().end(), y.begin() + n + 1);
  Vec k1;
  rhs(idx, y, k1);
  double t = 0.0, h = 0.01;
  double worst = 0.0;
  Vec x, p;
  for (double te : ts) {
    if (te < 0.0) throw std::invalid_argument("closed_form_residual: t < 0");
    while (t < te * (1.0 - 1e-15))
      dp45_step(idx, t, y, k1, h, te, cfg.tol);
    path.eval(te, x, p);
    for (int c = 0; c <= n; ++c) {
      worst = std::fmax(worst, std::fabs(x[c] - y[c]));
      worst = std::fmax(worst, std::fabs(p[c] - y[n + 1 + c]));
    }
  }
  return worst;
}

WavefrontGrid::WavefrontGrid(const MultiIndex& idx, const Vec& q0,
                             const CovectorGridSpec& spec, double t_max)
    : idx_(idx), q0_(q0), spec_(spec), t_max_(t_max) {
  const int n = idx_.n();
  if (!idx_.is_riemannian(q0))
    throw std::invalid_argument("WavefrontGrid: Riemannian base required");
  if (spec_.counts.empty()) {
    spec_.counts.assign(n, n == 1 ? 128 : (n == 2 ? 48 : 12));
    spec_.counts[n - 1] *= 2;
  }
  if (static_cast<int>(spec_.counts.size()) != n)
    throw std::invalid_argument("WavefrontGrid: counts size mismatch");

  tgrid_.resize(spec_.time_samples);
  for (int k = 0; k < spec_.time_samples; ++k)
    tgrid_[k] = t_max_ * (k + 1) / spec_.time_samples;

  long total = 1;
  for (int c : spec_.counts) total *= c;
  cands_.reserve(total);
  pos_.reserve(total);
  Vec phi(n);
  std::vector<int> iv(n, 0);
  for (long r = 0; r < total; ++r) {
    long rem = r;
    for (int d = 0; d < n; ++d) {
      iv[d] = static_cast<int>(rem % spec_.counts[d]);
      rem /= spec_.counts[d];
    }
    for (int d = 0; d < n; ++d) {
      const int beta = idx_.alpha(d) == 0 ? 1 : idx_.alpha(d);
      const double period = trig_alpha(beta).half_period() * (d == n - 1 ? 2.0 : 1.0);
      phi[d] = period * (iv[d] + 0.5) / spec_.counts[d];
    }
    GeodesicPath path = make_path_spherical(idx_, q0_, phi);
    Vec flat(tgrid_.size() * (n + 1));
    Vec x;
    for (size_t k = 0; k < tgrid_.size(); ++k) {
      path.position_with(path.integrals(tgrid_[k]), x);
      std::copy(x.begin(), x.end(), flat.begin() + k * (n + 1));
    }
    cands_.push_back({phi, std::move(path)});
    pos_.push_back(std::move(flat));
  }
}

CutEstimate WavefrontGrid::query(const Vec& lambda0) const {
  const int n = idx_.n();
  Vec lam = lambda0;
  const double h = hamiltonian(idx_, q0_, lam);
  if (!(h > 0.0)) throw std::invalid_argument("query: zero covector");
  const double s = std::sqrt(2.0 * h);
  for (double& c : lam) c /= s;
  const Vec ref_phi = covector_to_spherical(idx_, q0_, lam);
  Vec neg = lam;
  for (double& c : neg) c = -c;
  const Vec neg_phi = covector_to_spherical(idx_, q0_, neg);
  const GeodesicPath ref = make_path_spherical(idx_, q0_, ref_phi);
  return scan(ref, ref_phi);
}

CutEstimate WavefrontGrid::scan(const GeodesicPath& ref, const Vec& ref_phi) const {
  const int n = idx_.n();
  const int nt = static_cast<int>(tgrid_.size());
  const double tol = spec_.spatial_tol;

  // reference positions and scales
  std::vector<Vec> rpos(nt);
  Vec scale(nt);
  for (int k = 0; k < nt; ++k) {
    rpos[k] = ref.position(tgrid_[k]);
    double s2 = 0.0;
    for (double v : rpos[k]) s2 += v * v;
    scale[k] = 1.0 + std::sqrt(s2);
  }
  Vec neg = ref.covector();
  for (double& c : neg) c = -c;
  const Vec neg_phi = covector_to_spherical(idx_, q0_, neg);

  auto phi_close = [&](const Vec& a, const Vec& b) {
    for (int d = 0; d < n; ++d) {
      const int beta = idx_.alpha(d) == 0 ? 1 : idx_.alpha(d);
      const double period = trig_alpha(beta).half_period() * (d == n - 1 ? 2.0 : 1.0);
      const double cell = period / spec_.counts[d];
      double diff = std::fabs(a[d] - b[d]);
      if (d == n - 1) diff = std::fmin(diff, period - diff);
      if (diff > 1.5 * cell) return false;
    }
    return true;
  };

  struct Best {
    int hit_k = std::numeric_limits<int>::max();  // earliest grid index within tol
    double dmin = kInf;
    int dmin_k = -1;
    Vec phi;
    bool valid = false;
  } best;

  auto consider_flat = [&](const Vec& phi, const Vec& flat) {
    if (phi_close(phi, ref_phi) || phi_close(phi, neg_phi)) return;
    int hit = std::numeric_limits<int>::max();
    double dmin = kInf;
    int dmin_k = -1;
    for (int k = 0; k < nt; ++k) {
      double d2 = 0.0;
      for (int c = 0; c <= n; ++c) {
        const double dd = flat[k * (n + 1) + c] - rpos[k][c];
        d2 += dd * dd;
      }
      const double d = std::sqrt(d2) / scale[k];
      if (d < dmin) { dmin = d; dmin_k = k; }
      if (d <= tol && k < hit) { hit = k; break; }
    }
    const bool better =
        hit < best.hit_k ||
        (hit == best.hit_k && dmin < best.dmin);
    if (better) best = {hit, dmin, dmin_k, phi, true};
  };
  auto consider_path = [&](const Vec& phi) {
    GeodesicPath path = make_path_spherical(idx_, q0_, phi);
    Vec flat(nt * (n + 1)), x;
    for (int k = 0; k < nt; ++k) {
      path.position_with(path.integrals(tgrid_[k]), x);
      std::copy(x.begin(), x.end(), flat.begin() + k * (n + 1));
    }
    consider_flat(phi, flat);
  };

  int evaluated = static_cast<int>(cands_.size());
  for (size_t i = 0; i < cands_.size(); ++i)
    consider_flat(cands_[i].phi, pos_[i]);

  // sharp symmetric-pair witnesses
  for (int j : idx_.nonzero()) {
    if (ref.branch(j) != Branch::kTrig) continue;
    Vec phi = ref_phi;
    phi[j] = trig_alpha(idx_.alpha(j)).half_period() - phi[j];
    if (j == n - 1 && phi[j] < 0.0)
      phi[j] += 2.0 * trig_alpha(idx_.alpha(j)).half_period();
    consider_path(phi);
    ++evaluated;
  }

  // local refinement around the best candidate
  for (int round = 0; round < spec_.refine_rounds && best.valid; ++round) {
    const Vec center = best.phi;
    const int per_dim = 5;
    std::vector<int> iv(n, 0);
    long total = 1;
    for (int d = 0; d < n; ++d) total *= per_dim;
    for (long r = 0; r < total; ++r) {
      long rem = r;
      Vec phi(n);
      bool ok = true;
      for (int d = 0; d < n; ++d) {
        const int id = static_cast<int>(rem % per_dim);
        rem /= per_dim;
        const int beta = idx_.alpha(d) == 0 ? 1 : idx_.alpha(d);
        const double period =
            trig_alpha(beta).half_period() * (d == n - 1 ? 2.0 : 1.0);
        const double cell =
            period / spec_.counts[d] / std::pow(per_dim / 2.0, round);
        phi[d] = center[d] + cell * (id - per_dim / 2) / (per_dim / 2.0);
        if (d < n - 1 && (phi[d] <= 1e-9 || phi[d] >= period - 1e-9)) ok = false;
      }
      if (!ok) continue;
      consider_path(phi);
      ++evaluated;
    }
  }

  CutEstimate est;
  est.grid_total = evaluated;
  est.spatial_tol = tol;
  if (!best.valid) {
    est.note = "no witness candidates";
    return est;
  }

  // refine the intersection time of the winning witness
  const GeodesicPath wit = make_path_spherical(idx_, q0_, best.phi);
  auto dist = [&](double t) {
    const Vec a = ref.position(t);
    const Vec b = wit.position(t);
    double d2 = 0.0, s2 = 0.0;
    for (int c = 0; c <= n; ++c) {
      d2 += (a[c] - b[c]) * (a[c] - b[c]);
      s2 += a[c] * a[c];
    }
    return std::sqrt(d2) / (1.0 + std::sqrt(s2));
  };
  const int k0 = best.hit_k != std::numeric_limits<int>::max() ? best.hit_k : best.dmin_k;
  double lo = k0 > 0 ? tgrid_[k0 - 1] : 0.0;
  double hi = k0 + 1 < nt ? tgrid_[k0 + 1] : tgrid_[nt - 1];
  // golden-section minimize dist on [lo, hi]
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = dist(c1), f2 = dist(c2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = c2; c2 = c1; f2 = f1;
      c1 = b - gr * (b - a); f1 = dist(c1);
    } else {
      a = c1; c1 = c2; f1 = f2;
      c2 = a + gr * (b - a); f2 = dist(c2);
    }
    if (b - a < 1e-12 * std::fmax(1.0, b)) break;
  }
  const double tstar = 0.5 * (a + b);
  const double dstar = dist(tstar);
  est.witness = wit.covector();
  if (dstar > tol) {
    est.found = false;
    est.t_low = tstar;
    est.t_high = kInf;
    est.note = "no equal-time intersection within tolerance below t_max";
    return est;
  }
  est.found = true;
  // where the dip through tol starts and ends
  double span = tgrid_[0];
  double tl = tstar, th = tstar;
  {
    double l0 = std::fmax(0.0, tstar - span);
    while (dist(l0) <= tol && l0 > 0.0) l0 = std::fmax(0.0, l0 - span);
    tl = dist(l0) <= tol ? l0
                         : brent([&](double t) { return dist(t) - tol; }, l0,
                                 tstar, 1e-12);
    double h0 = std::fmin(t_max_, tstar + span);
    while (dist(h0) <= tol && h0 < t_max_) h0 = std::fmin(t_max_, h0 + span);
    th = dist(h0) <= tol ? h0
                         : brent([&](double t) { return dist(t) - tol; }, tstar,
                                 h0, 1e-12);
  }
  est.t_low = tl;
  est.t_high = th;
  est.note = "equal-time wavefront intersection (grid evidence, upper bound rigorous)";
  return est;
}

CutEstimate brute_cut_time(const MultiIndex& idx, const Vec& q0, const Vec& lambda0,
                           const CovectorGridSpec& spec, double t_max) {
  return WavefrontGrid(idx, q0, spec, t_max).query(lambda0);
}

}  // namespace grushin
