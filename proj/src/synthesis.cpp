#include "grushin/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "grushin/rootfind.hpp"

namespace grushin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

double quadrant_angle(const GenTrig& t, double s, double c) {
  if (s >= 0.0 && c >= 0.0) return t.arcsin(s);
  if (s >= 0.0) return t.half_period() - t.arcsin(s);
  if (c <= 0.0) return t.half_period() + t.arcsin(-s);
  return 2.0 * t.half_period() - t.arcsin(-s);
}

bool near_quarter(double phase, double half) {
  const double q1 = 0.5 * half, q3 = 1.5 * half;
  const double tol = 1e-12 * half;
  const double r = std::fmod(std::fmod(phase, 2.0 * half) + 2.0 * half, 2.0 * half);
  return std::fabs(r - q1) <= tol || std::fabs(r - q3) <= tol;
}

void require_n2(const MultiIndex& idx, const char* who) {
  if (idx.n() != 2)
    throw std::domain_error(std::string(who) + ": n = 2 only");
}

// (v0, w0) on the u0 = 0 fiber at a Riemannian point, parametrized by phi_2.
void fiber_u0(const MultiIndex& idx, const Vec& q0, double phi2, double& v0,
              double& w0) {
  const int a = idx.alpha(0), b = idx.alpha(1);
  const double d1 = rho(a, 1.0 / q0[0]);
  const GenTrig& tb = trig_alpha(b);
  double s, c;
  tb.sincos(phi2, s, c);
  v0 = c * d1;
  w0 = d1 * rho(b, s / q0[1]);
}

}  // namespace

SingularFiberCoord fiber_x_zero(int u0_sign, double kappa, double psi) {
  SingularFiberCoord f;
  f.kind = SingularCase::kXZero;
  f.u0_sign = u0_sign >= 0 ? 1 : -1;
  f.kappa = kappa;
  f.angle = psi;
  return f;
}

SingularFiberCoord fiber_y_zero(double theta, double w0) {
  SingularFiberCoord f;
  f.kind = SingularCase::kYZero;
  f.angle = theta;
  f.w0 = w0;
  return f;
}

SingularFiberCoord fiber_both_zero(int u0_sign, double v0, double w0) {
  SingularFiberCoord f;
  f.kind = SingularCase::kBothZero;
  f.u0_sign = u0_sign >= 0 ? 1 : -1;
  f.v0 = v0;
  f.w0 = w0;
  return f;
}

double tau_j(const GeodesicPath& path, int j) {
  const MultiIndex& idx = path.index();
  if (!idx.in_j(j)) throw std::domain_error("tau_j: j not in J");
  if (path.branch(j) != Branch::kTrig) return kInf;
  const double w = std::fabs(path.omega(j));
  if (w == 0.0) return kInf;
  const double target = trig_alpha(idx.alpha(j)).half_period() / w;
  if (j == 0) return target;  // I_0(t) = t
  return monotone_root(
      [&](double t) { return path.xi_integral(j, t) - target; }, target, 1e-12);
}

CutReport cut_report(const GeodesicPath& path) {
  const MultiIndex& idx = path.index();
  CutReport rep;
  rep.n2_exact = idx.n() == 2;
  rep.tau = kInf;
  for (int j : idx.nonzero()) {
    const double tj = tau_j(path, j);
    rep.tau_per_index.emplace_back(j, tj);
    rep.tau = std::fmin(rep.tau, tj);
  }
  if (std::isfinite(rep.tau)) {
    for (const auto& [j, tj] : rep.tau_per_index)
      if (tj <= rep.tau * (1.0 + 1e-12)) rep.argmin.push_back(j);
    for (int j : rep.argmin)
      if (path.branch(j) == Branch::kTrig &&
          near_quarter(path.phase(j), trig_alpha(idx.alpha(j)).half_period()))
        rep.conjugate_at_tau = true;
  }
  return rep;
}

std::pair<double, double> omega_global_3d(const MultiIndex& idx, const Vec& q0,
                                          const Vec& lambda0) {
  require_n2(idx, "omega_global_3d");
  const double h = hamiltonian(idx, q0, lambda0);
  if (std::fabs(h - 0.5) > 1e-9)
    throw std::invalid_argument("omega_global_3d: H(q0, lambda0) != 1/2");
  const int a = idx.alpha(0), b = idx.alpha(1);
  const double v0 = lambda0[1], w0 = lambda0[2];
  const double k2 = ipow(q0[1] * q0[1], b) * w0 * w0 + v0 * v0;
  const double w1 = std::pow(k2, 0.5 / a);
  const double w2 =
      std::pow(std::fabs(w0), 1.0 / b) * std::pow(k2, 0.5 * (b - 1) / b);
  return {w1, w2};
}

PointClass classify_point(const MultiIndex& idx, const Vec& q0) {
  require_n2(idx, "classify_point");
  if (!idx.is_riemannian(q0))
    throw std::invalid_argument("classify_point: singular base point");
  const int a = idx.alpha(0), b = idx.alpha(1);
  const double pa = trig_alpha(a).half_period();
  const double pb = trig_alpha(b).half_period();
  const double thr = pa * std::pow(std::fabs(q0[0]), a + 1) / (pb * (a + 1));
  PointClass c{PointType::kBoundary, thr};
  const double y = std::fabs(q0[1]);
  if (std::fabs(y - thr) <= 1e-12 * std::fmax(y, thr))
    c.type = PointType::kBoundary;
  else if (y > thr)
    c.type = PointType::kType1Strict;
  else
    c.type = PointType::kType2Strict;
  return c;
}

bool p_region(const MultiIndex& idx, const Vec& q0, double v0, double w0) {
  require_n2(idx, "p_region");
  const int a = idx.alpha(0), b = idx.alpha(1);
  const double pa = trig_alpha(a).half_period();
  const double pb = trig_alpha(b).half_period();
  const double k2 = ipow(q0[1] * q0[1], b) * w0 * w0 + v0 * v0;
  const double rhs = std::pow(pb / pa * (a + 1), 2.0 * b) *
                     std::pow(k2, b + 1.0 + static_cast<double>(b) / a);
  return w0 * w0 >= rhs;
}

double p_region_boundary_w(const MultiIndex& idx, const Vec& q0) {
  require_n2(idx, "p_region_boundary_w");
  const int b = idx.alpha(1);
  const GenTrig& tb = trig_alpha(b);
  const double quarter = 0.5 * tb.half_period();
  auto region = [&](double phi2) {
    double v0, w0;
    fiber_u0(idx, q0, phi2, v0, w0);
    return p_region(idx, q0, v0, w0);
  };
  if (!region(quarter))
    throw std::domain_error("p_region_boundary_w: fiber has no tau_2 <= tau_1 arc");
  double lo = 0.0, hi = quarter;  // region false at 0+, true at quarter
  while (hi - lo > 1e-12 * quarter) {
    const double mid = 0.5 * (lo + hi);
    (region(mid) ? hi : lo) = mid;
  }
  double v0, w0;
  fiber_u0(idx, q0, hi, v0, w0);
  return std::fabs(w0);
}

LocusPolyline trace_E(const MultiIndex& idx, const Vec& q0, int samples,
                      bool full_range) {
  require_n2(idx, "trace_E");
  if (!idx.is_riemannian(q0))
    throw std::invalid_argument("trace_E: singular base point");
  if (samples < 8) samples = 8;
  const int a = idx.alpha(0), b = idx.alpha(1);
  const GenTrig& ta = trig_alpha(a);
  const GenTrig& tb = trig_alpha(b);
  const double pa = ta.half_period(), pb = tb.half_period();

  std::vector<double> ph2s;
  const PointClass cls = classify_point(idx, q0);
  if (full_range || !cls.type2_route()) {
    ph2s.reserve(samples);
    for (int i = 0; i < samples; ++i) ph2s.push_back(2.0 * pb * i / samples);
  } else {
    const double r = p_region_boundary_w(idx, q0);
    const double arg = std::pow(
        r * std::pow(std::fabs(q0[0]), a) * std::pow(std::fabs(q0[1]), b),
        1.0 / b);
    const double ph2star = tb.arcsin(std::fmin(arg, 1.0));
    // Lambda_1 arcs [0, ph2*], [pb - ph2*, pb + ph2*], [2 pb - ph2*, 2 pb)
    const int m1 = std::max(2, samples / 4);
    const int m2 = std::max(4, samples / 2);
    for (int i = 0; i <= m1; ++i) ph2s.push_back(ph2star * i / m1);
    for (int i = 0; i <= m2; ++i)
      ph2s.push_back(pb - ph2star + 2.0 * ph2star * i / m2);
    for (int i = 0; i <= m1; ++i)
      ph2s.push_back(2.0 * pb - ph2star + ph2star * i / m1);
  }

  LocusPolyline poly;
  poly.label = full_range ? "E_full" : "E";
  poly.closed = true;
  for (double ph2 : ph2s) {
    if (ph2 >= 2.0 * pb) ph2 -= 2.0 * pb;
    const GeodesicPath path = make_path_spherical(idx, q0, {0.5 * pa, ph2});
    const double tau1 = pa / std::fabs(path.omega(0));
    const Vec x = path.position(tau1);
    auto same = [&](const std::array<double, 3>& p) {
      const double tol = 1e-9 * (1.0 + std::fabs(p[1]) + std::fabs(p[2]));
      return std::fabs(p[1] - x[1]) < tol && std::fabs(p[2] - x[2]) < tol;
    };
    if (!poly.points.empty() && (same(poly.points.back()) || same(poly.points.front())))
      continue;  // arc-junction and wrap-around duplicates
    poly.params.push_back(ph2);
    poly.points.push_back({x[0], x[1], x[2]});
  }
  return poly;
}

LocusPolyline trace_G(const MultiIndex& idx, const Vec& q0, int samples) {
  require_n2(idx, "trace_G");
  if (!(q0[1] == 0.0 && q0[0] != 0.0))
    throw std::invalid_argument("trace_G: requires y0 = 0, x0 != 0");
  if (samples < 8) samples = 8;
  const int a = idx.alpha(0), b = idx.alpha(1);
  const double pa = trig_alpha(a).half_period();
  const double pb = trig_alpha(b).half_period();
  const double vmag = std::pow(std::fabs(q0[0]), -a);
  const double wmax = std::pow(pb / pa * (a + 1), b) *
                      std::pow(std::fabs(q0[0]), -(a * b + a + b));

  LocusPolyline poly;
  poly.label = "G";
  poly.closed = true;
  const int half = std::max(4, samples / 2);
  auto add = [&](double v0, double w0, double par) {
    // theta from (u0 = 0, v0): sin_alpha(theta) = x0 * sgn(v0) |v0|^{1/alpha}
    const double s = std::clamp(
        q0[0] * sgn(v0) * std::pow(std::fabs(v0), 1.0 / a), -1.0, 1.0);
    const GeodesicPath path =
        singular_geodesic(idx, q0, fiber_y_zero(quadrant_angle(trig_alpha(a), s, 0.0), w0));
    const double tau1 = pa / std::fabs(path.omega(0));
    const Vec x = path.position(tau1);
    poly.params.push_back(par);
    poly.points.push_back({x[0], x[1], x[2]});
  };
  for (int i = 0; i <= half; ++i)  // v0 > 0 branch, w0 from +wmax down to -wmax
    add(vmag, wmax - 2.0 * wmax * i / half, static_cast<double>(i));
  for (int i = 1; i < half; ++i)   // v0 < 0 branch, w0 back up
    add(-vmag, -wmax + 2.0 * wmax * i / half, static_cast<double>(half + i));
  return poly;
}

CutLocus3D cut_locus_3d(const MultiIndex& idx, const Vec& q0, int samples) {
  require_n2(idx, "cut_locus_3d");
  const int b = idx.alpha(1);
  const double pb = trig_alpha(b).half_period();
  const double x0 = q0[0], y0 = q0[1], z0 = q0[2];
  const double offset = pb * std::pow(std::fabs(y0), b + 1) / (b + 1);

  CutLocus3D out;
  auto lambda2_lines = [&](double yplane) {
    const double span = std::fmax(5.0, 3.0 * std::fabs(x0));
    for (int sign : {+1, -1}) {
      LocusPolyline line;
      line.label = sign > 0 ? "Lambda2+" : "Lambda2-";
      line.closed = false;
      const int m = std::max(2, samples / 8);
      for (int i = 0; i <= m; ++i) {
        const double x = -span + 2.0 * span * i / m;
        line.params.push_back(x);
        line.points.push_back({x, yplane, z0 + sign * offset});
      }
      out.polylines.push_back(std::move(line));
    }
  };

  const bool xs = idx.alpha(0) != 0 && x0 == 0.0;
  const bool ys = b != 0 && y0 == 0.0;
  if (!xs && !ys) {
    // Riemannian: Cut_x = {x = -x0} \ int(E), Cut_y = {y = -y0, |z - z0| >= offset}
    SurfaceDescriptor sx;
    sx.plane_axis = 0;
    sx.plane_value = -x0;
    sx.exclusion = SurfaceDescriptor::Exclusion::kCurveInterior;
    sx.boundary_label = "E";
    out.surfaces.push_back(sx);
    SurfaceDescriptor sy;
    sy.plane_axis = 1;
    sy.plane_value = -y0;
    sy.exclusion = SurfaceDescriptor::Exclusion::kSlab;
    sy.slab_center = z0;
    sy.slab_halfwidth = offset;
    out.surfaces.push_back(sy);
    out.polylines.push_back(trace_E(idx, q0, samples));
    lambda2_lines(-y0);
  } else if (xs && ys) {
    SurfaceDescriptor sx;
    sx.plane_axis = 0;
    sx.plane_value = 0.0;
    out.surfaces.push_back(sx);
    SurfaceDescriptor sy;
    sy.plane_axis = 1;
    sy.plane_value = 0.0;
    out.surfaces.push_back(sy);
    // no cut-conjugate points, no boundary polylines
  } else if (xs) {
    SurfaceDescriptor sx;
    sx.plane_axis = 0;
    sx.plane_value = 0.0;
    out.surfaces.push_back(sx);
    SurfaceDescriptor sy;
    sy.plane_axis = 1;
    sy.plane_value = -y0;
    sy.exclusion = SurfaceDescriptor::Exclusion::kSlab;
    sy.slab_center = z0;
    sy.slab_halfwidth = offset;
    out.surfaces.push_back(sy);
    lambda2_lines(-y0);
  } else {
    SurfaceDescriptor sx;
    sx.plane_axis = 0;
    sx.plane_value = -x0;
    sx.exclusion = SurfaceDescriptor::Exclusion::kCurveInterior;
    sx.boundary_label = "G";
    out.surfaces.push_back(sx);
    SurfaceDescriptor sy;
    sy.plane_axis = 1;
    sy.plane_value = 0.0;
    out.surfaces.push_back(sy);
    out.polylines.push_back(trace_G(idx, q0, samples));
  }
  return out;
}

double t_star(const MultiIndex& idx, const Vec& q0, const Vec& phi) {
  require_n2(idx, "t_star");
  const double pa = trig_alpha(idx.alpha(0)).half_period();
  if (!(phi[0] > 0.5 * pa && phi[0] < pa))
    throw std::domain_error("t_star: phi_1 outside (pi_alpha/2, pi_alpha)");
  const GeodesicPath path = make_path_spherical(idx, q0, phi);
  return 2.0 * (pa - phi[0]) / std::fabs(path.omega(0));
}

double t_star_star(const MultiIndex& idx, const Vec& q0, const Vec& phi) {
  require_n2(idx, "t_star_star");
  const int b = idx.alpha(1);
  const GenTrig& tb = trig_alpha(b);
  const double pb = tb.half_period();
  if (!(phi[1] >= 0.5 * pb && phi[1] <= 1.5 * pb))
    throw std::domain_error("t_star_star: phi_2 outside [pi_beta/2, 3 pi_beta/2]");
  const GeodesicPath path = make_path_spherical(idx, q0, phi);
  double target;
  if (path.branch(1) == Branch::kTrig) {
    target = 2.0 * (pb - phi[1]) / path.omega(1);
  } else {
    // sin_beta(phi_2) = 0: linear y-branch, y = y0 + p_2 I_2
    const double p2 = path.covector()[1];
    if (p2 == 0.0) throw std::domain_error("t_star_star: geodesic never hits -y0");
    target = -2.0 * q0[1] / p2;
  }
  if (target < 0.0) throw std::domain_error("t_star_star: plane not reached");
  if (target == 0.0) return 0.0;
  return monotone_root(
      [&](double t) { return path.xi_integral(1, t) - target; }, target, 1e-12);
}

double k_fun(int alpha, double phi1) {
  const GenTrig& ta = trig_alpha(alpha);
  const double pa = ta.half_period();
  if (!(phi1 > 0.5 * pa && phi1 < pa))
    throw std::domain_error("k_fun: phi_1 outside (pi_alpha/2, pi_alpha)");
  return 2.0 * (pa - ta.eta(phi1)) / std::pow(ta.sin(phi1), alpha + 1);
}

GeodesicPath singular_geodesic(const MultiIndex& idx, const Vec& q0,
                               const SingularFiberCoord& fiber) {
  require_n2(idx, "singular_geodesic");
  const int a = idx.alpha(0), b = idx.alpha(1);
  const GenTrig& ta = trig_alpha(a);
  const GenTrig& tb = trig_alpha(b);
  const double x0 = q0[0], y0 = q0[1];
  std::vector<GeodesicPath::Coord> coords(2);
  Vec p0(3, 0.0);

  auto y_coord_from = [&](double v0, double w0) {
    // phase-zero y-coordinate shared by the y0 = 0 parametrizations
    if (w0 != 0.0 && v0 != 0.0) {
      coords[1].branch = Branch::kTrig;
      coords[1].amplitude = std::pow(std::fabs(v0 / w0), 1.0 / b);
      coords[1].omega =
          sgn(v0) * std::pow(std::fabs(w0) * std::pow(std::fabs(v0), b - 1.0), 1.0 / b);
      coords[1].phase = 0.0;
    } else {
      coords[1].branch = Branch::kLinear;
    }
  };

  switch (fiber.kind) {
    case SingularCase::kXZero: {
      if (!(x0 == 0.0 && y0 != 0.0))
        throw std::invalid_argument("singular_geodesic: base is not an x0 = 0 fiber");
      const double kappa = fiber.kappa;
      if (kappa < 0.0) throw std::invalid_argument("singular_geodesic: kappa < 0");
      double sb, cb;
      tb.sincos(fiber.angle, sb, cb);
      const double v0 = kappa * cb;
      const double w0 = kappa * rho(b, sb / y0);
      p0 = {static_cast<double>(fiber.u0_sign), v0, w0};
      if (kappa == 0.0) {
        coords[0].branch = Branch::kLinear;
        coords[1].branch = Branch::kLinear;
      } else {
        coords[0].branch = Branch::kTrig;
        coords[0].amplitude = std::pow(kappa, -1.0 / a);
        coords[0].omega = fiber.u0_sign * std::pow(kappa, 1.0 / a);
        coords[0].phase = 0.0;
        if (w0 != 0.0) {
          coords[1].branch = Branch::kTrig;
          coords[1].amplitude = y0 / sb;
          coords[1].omega = kappa * sb / y0;
          coords[1].phase = fiber.angle;
        } else {
          coords[1].branch = Branch::kLinear;
        }
      }
      break;
    }
    case SingularCase::kYZero: {
      if (!(y0 == 0.0 && x0 != 0.0))
        throw std::invalid_argument("singular_geodesic: base is not a y0 = 0 fiber");
      double sa, ca;
      ta.sincos(fiber.angle, sa, ca);
      const double u0 = ca;
      const double v0 = rho(a, sa / x0);
      p0 = {u0, v0, fiber.w0};
      if (v0 == 0.0) {
        coords[0].branch = Branch::kLinear;  // straight line, y stays 0
        coords[1].branch = Branch::kLinear;
      } else {
        coords[0].branch = Branch::kTrig;
        coords[0].amplitude = x0 / sa;
        coords[0].omega = sa / x0;
        coords[0].phase = fiber.angle;
        y_coord_from(v0, fiber.w0);
      }
      break;
    }
    case SingularCase::kBothZero: {
      if (!(x0 == 0.0 && y0 == 0.0))
        throw std::invalid_argument("singular_geodesic: base is not the x0 = y0 = 0 fiber");
      p0 = {static_cast<double>(fiber.u0_sign), fiber.v0, fiber.w0};
      if (fiber.v0 == 0.0) {
        coords[0].branch = Branch::kLinear;
        coords[1].branch = Branch::kLinear;
      } else {
        const double kappa = std::fabs(fiber.v0);
        coords[0].branch = Branch::kTrig;
        coords[0].amplitude = std::pow(kappa, -1.0 / a);
        coords[0].omega = fiber.u0_sign * std::pow(kappa, 1.0 / a);
        coords[0].phase = 0.0;
        y_coord_from(fiber.v0, fiber.w0);
      }
      break;
    }
  }
  return GeodesicPath(idx, q0, p0, std::move(coords), {}, {});
}

GeodesicPath make_path_3d(const MultiIndex& idx, const Vec& q0, Vec lambda0,
                          double* rescale) {
  require_n2(idx, "make_path_3d");
  const double h = hamiltonian(idx, q0, lambda0);
  if (!(h > 0.0))
    throw std::invalid_argument("make_path_3d: zero covector");
  const double s = std::sqrt(2.0 * h);
  if (rescale) *rescale = s;
  for (double& c : lambda0) c /= s;

  const int a = idx.alpha(0), b = idx.alpha(1);
  const bool xs = a != 0 && q0[0] == 0.0;
  const bool ys = b != 0 && q0[1] == 0.0;
  if (!xs && !ys) return make_path_covector(idx, q0, lambda0);

  const double u0 = lambda0[0], v0 = lambda0[1], w0 = lambda0[2];
  if (xs && ys) return singular_geodesic(idx, q0, fiber_both_zero(sgn(u0), v0, w0));
  if (xs) {
    const double kappa = std::hypot(v0, ipow(std::fabs(q0[1]), b) * w0);
    double psi = 0.0;
    if (kappa > 0.0) {
      const double c = std::clamp(v0 / kappa, -1.0, 1.0);
      double sg = sgn(w0) * sgn(q0[1]) *
                  std::fabs(q0[1]) * std::pow(std::fabs(w0) / kappa, 1.0 / b);
      sg = std::clamp(sg, -1.0, 1.0);
      psi = quadrant_angle(trig_alpha(b), sg, c);
    }
    return singular_geodesic(idx, q0, fiber_x_zero(sgn(u0), kappa, psi));
  }
  // ys: theta from (u0, v0) on the cylinder
  double sa = q0[0] * sgn(v0) * std::pow(std::fabs(v0), 1.0 / a);
  sa = std::clamp(sa, -1.0, 1.0);
  const double theta = quadrant_angle(trig_alpha(a), sa, std::clamp(u0, -1.0, 1.0));
  return singular_geodesic(idx, q0, fiber_y_zero(theta, w0));
}

}  // namespace grushin
