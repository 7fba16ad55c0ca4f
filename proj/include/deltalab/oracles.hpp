#pragma once

#include <vector>

#include "deltalab/spectra.hpp"

namespace deltalab {

/// 1-D Dirichlet problem -u'' + sum_k omega_k delta(x - x_k) u = E u on
/// [0, L], solved by transfer matrices with the jump condition
/// u'(x_k+) = u'(x_k-) + omega_k u(x_k).
struct ShootingProblem {
  double length = 1.0;
  std::vector<std::pair<double, double>> deltas;  // (position, strength), sorted

  static ShootingProblem from_domain(const DomainSpec& domain,
                                     const CouplingField& omega);
  void validate() const;
};

/// Exact eigenvalues in the window via Sturm zero counting plus bisection
/// on the boundary mismatch u(L). Roots are resolved to ~machine precision
/// relative to |E|.
Spectrum shoot_spectrum(const ShootingProblem& problem, double window_lo,
                        double window_hi, double rel_tol = 1e-14);

struct GridOracleResult {
  Spectrum spectrum;                 // Richardson-extrapolated energies
  std::vector<double> error_bars;    // |E_h - E_{h/2}| / 3 per root
};

/// Second-order finite-difference oracle; the delta sits on a grid node as
/// an on-site weight omega/h. Requires the two mesh levels to agree on the
/// eigenvalue count.
GridOracleResult grid_oracle_1d(const ShootingProblem& problem, double h,
                                double window_lo, double window_hi);

/// Whole-space bound-state energies for one or two equal-coupling centers:
/// single-center anchors E = -omega^2/4 (d=1), -(4 pi/omega)^2 (d=3),
/// -exp(4 pi/omega) (d=2); two centers solve sigma_d(kappa) = +-g_d(r; kappa).
/// Missing branches (e.g. the d=1 antisymmetric state below threshold) are
/// simply absent from the returned list.
std::vector<double> closed_form_centers(int dimension, double omega_value,
                                        int centers, double separation = 0.0);

struct RankOnePair {
  int n = 0;
  std::vector<double> a;    // column-major symmetric
  std::vector<double> phi;  // unit vector
  double lo = 0.0, hi = 0.0;
};

/// Builds a pair with normalized phi and interval endpoints jittered off
/// both spectra.
RankOnePair make_rank_one_pair(int n, std::vector<double> a, std::vector<double> phi,
                               double lo, double hi);

struct RankOneReport {
  int count_a = 0;
  int count_ab = 0;
  bool counting_ok = false;      // |Tr E_A(I) - Tr E_{A+B}(I)| <= 1 and the
                                 // one-sided bound when Tr E_A(I) >= 1
  bool interlacing_ok = false;   // poles of F_A and F_{A+B} alternate in I
  double max_formula_error = 0;  // sup |F_{A+B} - F_A/(1+F_A)| on the grid
  bool cyclic = false;           // Krylov rank pre-check
};

/// Checks the rank-one perturbation identities for B = phi phi^T directly
/// against two independent eigendecompositions.
RankOneReport rank_one_verify(const RankOnePair& pair, int formula_grid = 64);

}  // namespace deltalab
