#pragma once

#include <string>
#include <vector>

#include "grushin/geoflow.hpp"

namespace grushin {

// Direct integration of Hamilton's equations, used as ground truth for the
// closed forms. RK45 is an adaptive Dormand-Prince 5(4) pair; RK4 is the
// fixed-step classic scheme (kept for the convergence-order check).
struct IntegratorConfig {
  enum class Method { kRK4, kRK45 };
  Method method = Method::kRK45;
  double step = 1e-3;   // RK4 step
  double tol = 1e-9;    // RK45 local error tolerance
  double t_max = 10.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> y;   // state (x, p) stacked, 2(n+1) entries
  std::vector<Vec> dy;  // derivatives at the nodes (for Hermite sampling)
  double h_drift = 0.0; // max |H - H0| over accepted steps
  int dim = 0;          // n + 1

  void sample(double ts, Vec& x, Vec& p) const;  // cubic Hermite between nodes
};

Trajectory integrate_hamilton(const MultiIndex& idx, const Vec& x0, const Vec& p0,
                              const IntegratorConfig& cfg);

// sup over the grid of the closed-form vs integrated state deviation.
double closed_form_residual(const GeodesicPath& path, const std::vector<double>& t_grid,
                            const IntegratorConfig& cfg = {});

// Bracketing estimate of the cut time by equal-time wavefront intersection:
// the earliest t at which another unit covector reaches the same point within
// the spatial tolerance certifies non-minimality beyond t.
struct CutEstimate {
  bool found = false;
  double t_low = 0.0;
  double t_high = 0.0;
  Vec witness;       // covector of the intersecting geodesic
  int grid_total = 0;
  double spatial_tol = 0.0;
  std::string note;
};

struct CovectorGridSpec {
  std::vector<int> counts;   // per phi dimension; defaults chosen when empty
  int refine_rounds = 2;
  int time_samples = 500;
  double spatial_tol = 1e-6;
};

// Shared wavefront scan at one Riemannian base point: grid paths and their
// positions on a common time grid, reusable across query covectors.
class WavefrontGrid {
 public:
  WavefrontGrid(const MultiIndex& idx, const Vec& q0, const CovectorGridSpec& spec,
                double t_max);
  CutEstimate query(const Vec& lambda0) const;
  const MultiIndex& index() const { return idx_; }

 private:
  struct Candidate {
    Vec phi;
    GeodesicPath path;
  };
  CutEstimate scan(const GeodesicPath& ref, const Vec& ref_phi) const;

  MultiIndex idx_;
  Vec q0_;
  CovectorGridSpec spec_;
  double t_max_;
  std::vector<double> tgrid_;
  std::vector<Candidate> cands_;
  std::vector<Vec> pos_;  // [cand] -> positions stacked (time-major per cand)
};

CutEstimate brute_cut_time(const MultiIndex& idx, const Vec& q0, const Vec& lambda0,
                           const CovectorGridSpec& spec, double t_max);

}  // namespace grushin
