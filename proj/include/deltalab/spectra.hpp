#pragma once

#include <vector>

#include "deltalab/kmatrix.hpp"

namespace deltalab {

/// d = 1, 3: eigenvalue branches of K(E) fall with E, eigenvalues of the
/// Hamiltonian below E show up as negative eigenvalues of K(E).
/// d = 2: the branches rise and the count reads off positive eigenvalues.
enum class Orientation { Decreasing, Increasing };
Orientation counting_orientation(int dimension);

struct SolveOptions {
  double root_tol = 1e-11;   // absolute bracket width on the energy axis
  double image_tol = 1e-12;  // image-sum truncation
  double deep_probe = -1e8;  // count must vanish there
  int max_polish_iters = 48;
};

struct OrientationViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Eigenvalue counting function E -> #{spec H < E} with monotonicity
/// surveillance across all evaluations made through one instance.
class CountingFunction {
 public:
  CountingFunction(const DomainSpec& domain, const CouplingField& omega,
                   SolveOptions opts = {});

  int operator()(double energy) const;
  /// Count plus the signed eigenvalue of K(E) nearest zero.
  std::pair<int, double> count_and_branch(double energy) const;
  bool jitter_applied() const { return jittered_; }
  void verify_deep_probe() const;  // throws if the count is not 0 there

 private:
  std::pair<int, double> evaluate(double energy, bool want_branch) const;
  int classify(const Inertia& inertia) const;
  void record_and_check(double probe, int count) const;

  const DomainSpec& domain_;
  const CouplingField& omega_;
  SolveOptions opts_;
  Orientation orientation_;
  mutable std::vector<std::pair<double, int>> history_;  // sorted by energy
  mutable bool jittered_ = false;
};

struct EigenvalueRecord {
  double energy = 0.0;
  int multiplicity = 1;
  double residual = 0.0;  // smallest singular value of K at the root
  bool cluster = false;   // true when roots could not be separated at root_tol
};

struct Spectrum {
  std::vector<EigenvalueRecord> eigenvalues;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int count_lo = 0;
  int count_hi = 0;

  int total_multiplicity() const;
  std::vector<double> expanded() const;  // one energy per multiplicity, sorted
};

int count_below(const DomainSpec& domain, const CouplingField& omega, double energy,
                const SolveOptions& opts = {});

/// All eigenvalues in [lo, hi] (< 0) by count bisection plus a safeguarded
/// secant on the near-zero branch of K(E).
Spectrum solve_spectrum(const DomainSpec& domain, const CouplingField& omega,
                        double window_lo, double window_hi,
                        const SolveOptions& opts = {});

struct BranchReport {
  double max_violation = 0.0;  // worst monotonicity defect across branches
  int grid_points = 0;
  int branches = 0;
};

/// Tracks the sorted eigenvalue branches of K(E) across an energy grid and
/// measures how far they deviate from the per-dimension monotone direction.
BranchReport branch_monotonicity_check(const DomainSpec& domain,
                                       const CouplingField& omega,
                                       const std::vector<double>& energy_grid,
                                       const SolveOptions& opts = {});

}  // namespace deltalab
