#pragma once

#include <span>
#include <vector>

#include "grushin/gentrig.hpp"

namespace grushin {

using Vec = std::vector<double>;

// x^e for integer e >= 0 by squaring; sign-exact for odd exponents.
double ipow(double x, int e);

// Exponent tuple (alpha_0, ..., alpha_{n-1}) of the Grushin space G^{n+1}.
// Coordinates are 0-based: the space has n+1 coordinates x_0..x_n and the
// frame fields X_j = (prod_{i<j} x_i^{alpha_i}) d/dx_j.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> alpha);
  int n() const { return static_cast<int>(alpha_.size()); }
  int dim() const { return n() + 1; }
  int alpha(int j) const { return alpha_[j]; }
  const std::vector<int>& exponents() const { return alpha_; }
  // J = indices with alpha_j != 0, recomputed on demand.
  std::vector<int> nonzero() const;
  bool in_j(int j) const { return j >= 0 && j < n() && alpha_[j] != 0; }
  // x_j != 0 for every j in J.
  bool is_riemannian(std::span<const double> x) const;

 private:
  std::vector<int> alpha_;
};

// xi_j(x) = prod_{i<j} x_i^{alpha_i}; empty product is 1.
double xi(const MultiIndex& idx, std::span<const double> x, int j);

// H(x, p) = 1/2 sum_j xi_j^2(x) p_j^2.
double hamiltonian(const MultiIndex& idx, std::span<const double> x,
                   std::span<const double> p);

// Conserved quantities R_0..R_{n+1} recomputed from a state (x, p):
// R_{n+1} = 0, R_n = |p_n|, R_j = sqrt(R_{j+1}^2 x_j^{2 alpha_j} + p_j^2).
Vec r_values(const MultiIndex& idx, std::span<const double> x,
             std::span<const double> p);

// Generalized spherical chart on H_{x0}^{-1}(1/2) at a Riemannian base point.
// phi has n entries; indices with alpha_i = 0 use the classical circle factor
// (beta_i = 1, x0_i treated as 1).
Vec spherical_to_covector(const MultiIndex& idx, const Vec& x0, const Vec& phi);
// Inverse chart by per-index quadrant analysis; canonical ranges
// phi_j in [0, pi_{beta_j}] for j < n-1 and phi_{n-1} in [0, 2 pi).
Vec covector_to_spherical(const MultiIndex& idx, const Vec& x0, const Vec& p0);

enum class Branch { kLinear, kTrig };

// Closed-form geodesic: each coordinate is either
//   x_j(t) = A_j sin_{alpha_j}(omega_j I_j(t) + phi_j)   (trig branch)
//   x_j(t) = x0_j + p0_j I_j(t)                          (linear branch)
// with I_j(t) = int_0^t xi_j^2(s) ds evaluated by the eta recursion.
// Immutable after construction; evaluation is pure.
class GeodesicPath {
 public:
  struct Coord {
    Branch branch = Branch::kLinear;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double eta_phase = 0.0;  // eta_{alpha_j}(phase), cached
    double coeff = 0.0;      // A^{2 alpha} / (omega (alpha + 1)), cached
  };

  // Low-level constructor used by the factories (Riemannian chart and the
  // singular fibers). coords has n entries for coordinates 0..n-1; the last
  // coordinate is always linear. phi / delta may be empty for paths not born
  // from the spherical chart.
  GeodesicPath(MultiIndex idx, Vec x0, Vec p0, std::vector<Coord> coords,
               Vec phi, Vec delta);

  const MultiIndex& index() const { return idx_; }
  const Vec& base() const { return x0_; }
  const Vec& covector() const { return p0_; }
  const Vec& phi() const { return phi_; }
  bool chart_born() const { return !phi_.empty(); }
  Branch branch(int j) const { return coords_[j].branch; }
  double amplitude(int j) const { return coords_[j].amplitude; }
  double omega(int j) const { return coords_[j].omega; }
  double phase(int j) const { return coords_[j].phase; }
  double delta(int j) const { return delta_[j]; }
  double R(int j) const { return r_[j]; }  // j in [0, n+1]

  // I_0..I_n at time t, one forward pass.
  Vec integrals(double t) const;
  double xi_integral(int j, double t) const;

  void eval(double t, Vec& x, Vec& p) const;
  Vec position(double t) const;
  // Evaluation reusing a precomputed integrals(t) vector.
  void eval_with(const Vec& integrals, Vec& x, Vec& p) const;
  void position_with(const Vec& integrals, Vec& x) const;

 private:
  MultiIndex idx_;
  Vec x0_, p0_;
  std::vector<Coord> coords_;
  Vec phi_;    // chart angles (empty when not chart-born)
  Vec delta_;  // chart deltas (empty when not chart-born)
  Vec r_;      // R_0..R_{n+1}
};

// Riemannian-base factories.
GeodesicPath make_path_spherical(const MultiIndex& idx, const Vec& x0,
                                 const Vec& phi);
GeodesicPath make_path_covector(const MultiIndex& idx, const Vec& x0,
                                const Vec& p0);

// Isometric embedding G^{n+1} -> G^{n+2}: the old last coordinate receives
// exponent alpha_new, a fresh constant coordinate x_extra is appended with
// zero momentum.
GeodesicPath embed(const GeodesicPath& path, int alpha_new, double x_extra);

}  // namespace grushin
