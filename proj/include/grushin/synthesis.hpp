#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "grushin/geoflow.hpp"

namespace grushin {

// Cut-time candidates tau_j = min{t > 0 : |omega_j| I_j(t) = pi_{alpha_j}}
// per index, and tau = min over J. For n = 2 the value is the exact cut time;
// for n > 2 it is an upper bound on t_cut and a lower bound on t_con.
struct CutReport {
  std::vector<std::pair<int, double>> tau_per_index;  // (j in J, tau_j)
  double tau = 0.0;
  std::vector<int> argmin;
  bool conjugate_at_tau = false;  // quarter-period equality condition
  bool n2_exact = false;          // n == 2: tau = t_cut
};

enum class PointType { kType1Strict, kType2Strict, kBoundary };

struct PointClass {
  PointType type;
  double threshold;  // pi_alpha |x0|^{alpha+1} / (pi_beta (alpha + 1))
  bool type2_route() const { return type != PointType::kType1Strict; }
};

struct LocusPolyline {
  std::string label;
  std::vector<double> params;
  std::vector<std::array<double, 3>> points;
  bool closed = false;
};

struct SurfaceDescriptor {
  int plane_axis = 0;  // 0: {x = value}, 1: {y = value}
  double plane_value = 0.0;
  enum class Exclusion { kNone, kSlab, kCurveInterior } exclusion = Exclusion::kNone;
  double slab_center = 0.0;     // kSlab: |z - center| < halfwidth excluded
  double slab_halfwidth = 0.0;
  std::string boundary_label;   // kCurveInterior: interior of this polyline excluded
};

struct CutLocus3D {
  std::vector<SurfaceDescriptor> surfaces;
  std::vector<LocusPolyline> polylines;
};

// Singular-fiber coordinates on H^{-1}(1/2) at a singular base (n = 2).
enum class SingularCase { kXZero, kYZero, kBothZero };

struct SingularFiberCoord {
  SingularCase kind;
  int u0_sign = 1;     // cases x0=0 (and both zero)
  double kappa = 0.0;  // case x0=0: sqrt(v0^2 + y0^{2 beta} w0^2)
  double angle = 0.0;  // psi (case x0=0) or theta (case y0=0)
  double w0 = 0.0;     // cases y0=0 and both-zero
  double v0 = 0.0;     // case both-zero
};
SingularFiberCoord fiber_x_zero(int u0_sign, double kappa, double psi);
SingularFiberCoord fiber_y_zero(double theta, double w0);
SingularFiberCoord fiber_both_zero(int u0_sign, double v0, double w0);

double tau_j(const GeodesicPath& path, int j);
CutReport cut_report(const GeodesicPath& path);

// Frequency magnitudes (|omega_1|, |omega_2|) valid on the whole H^{-1}(1/2)
// including singular fibers (n = 2).
std::pair<double, double> omega_global_3d(const MultiIndex& idx, const Vec& q0,
                                          const Vec& lambda0);

PointClass classify_point(const MultiIndex& idx, const Vec& q0);

// true iff tau_2 <= tau_1 for the covector with coordinates (v0, w0) on the
// u0 = 0 fiber:  w0^2 >= ((pi_beta/pi_alpha)(alpha+1))^{2 beta}
//                         (y0^{2 beta} w0^2 + v0^2)^{beta + 1 + beta/alpha}.
bool p_region(const MultiIndex& idx, const Vec& q0, double v0, double w0);

// Minimal |w0| on the u0 = 0 fiber with p_region true (the r of the type-2
// construction), by bisection in phi_2.
double p_region_boundary_w(const MultiIndex& idx, const Vec& q0);

// Boundary curve E of the cut locus in {x = -x0} at a Riemannian point.
// Type-2 points restrict phi_2 to the Lambda_1 arcs unless full_range is set.
LocusPolyline trace_E(const MultiIndex& idx, const Vec& q0, int samples,
                      bool full_range = false);

// Boundary curve G for a singular base with y0 = 0, x0 != 0.
LocusPolyline trace_G(const MultiIndex& idx, const Vec& q0, int samples);

CutLocus3D cut_locus_3d(const MultiIndex& idx, const Vec& q0, int samples);

// First hitting time of {x = -x0}: t* = 2 (pi_alpha - phi_1) / |omega_1|,
// phi_1 in (pi_alpha/2, pi_alpha).
double t_star(const MultiIndex& idx, const Vec& q0, const Vec& phi);

// First hitting time of {y = -y0}: the root of I_2(t) = 2 (pi_beta - phi_2)
// / omega_2, phi_2 in [pi_beta/2, 3 pi_beta/2].
double t_star_star(const MultiIndex& idx, const Vec& q0, const Vec& phi);

// K(phi_1) = 2 (pi_alpha - eta_alpha(phi_1)) / sin_alpha^{alpha+1}(phi_1) on
// (pi_alpha/2, pi_alpha); decreasing from pi_alpha to 0.
double k_fun(int alpha, double phi1);

GeodesicPath singular_geodesic(const MultiIndex& idx, const Vec& q0,
                               const SingularFiberCoord& fiber);

// n = 2 dispatch: Riemannian bases go through the spherical chart, singular
// bases through the case parametrizations. lambda0 is rescaled to H = 1/2;
// the applied scale factor is written to *rescale when given.
GeodesicPath make_path_3d(const MultiIndex& idx, const Vec& q0, Vec lambda0,
                          double* rescale = nullptr);

}  // namespace grushin
