#pragma once

#include <cstdint>
#include <vector>

#include "deltalab/spectra.hpp"

namespace deltalab {

/// Rescaled eigenvalues x_j = |Lambda| (E_j - E_0) of one realization,
/// multiplicity-expanded and sorted, clipped to |x| <= halfwidth by the
/// solve window.
struct PointSample {
  std::int64_t realization_id = 0;
  std::vector<double> points;
  double halfwidth = 0.0;
  double e0 = 0.0;
};

PointSample build_les(const Spectrum& spectrum, std::int64_t realization_id, double e0,
                      double volume, double halfwidth);

/// Division of a cube of side L into (L/l)^d Dirichlet blocks of side
/// l = the largest divisor of L not exceeding ceil(L^alpha). Each block
/// keeps the half-unit site margin of the parent lattice.
struct SubcubeArray {
  double block_side = 0.0;
  int blocks_per_axis = 0;
  double alpha = 0.0;
  std::vector<DomainSpec> blocks;                    // local coordinates [0, l]^d
  std::vector<std::vector<std::size_t>> site_index;  // global site ids per block

  static SubcubeArray build(const DomainSpec& domain, double alpha);
};

/// Superposition process zeta: every block solved independently with
/// Dirichlet conditions, all rescaled by the volume of the *parent* cube.
PointSample build_zeta(const DomainSpec& domain, const CouplingField& omega,
                       const SubcubeArray& array, std::int64_t realization_id,
                       double e0, double halfwidth, const SolveOptions& opts = {});

/// Test function class: f(x) = sum_i a_i tau_i / ((x - sigma_i)^2 + tau_i^2),
/// a_i > 0, tau_i > 0.
struct TestFunction {
  struct Term {
    double a;
    double sigma;
    double tau;
  };
  std::vector<Term> terms;

  void validate() const;
  double operator()(double x) const;
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Mean count in the physical window [E0 - delta/2, E0 + delta/2] divided
/// by |Lambda| * delta: the finite-volume density-of-states proxy.
Estimate estimate_dos(const std::vector<int>& window_counts, double volume,
                      double delta);

struct ScanRow {
  double eta = 0.0;
  Estimate mean_count;        // E[X(I_eta)]
  Estimate prob_at_least_one; // P[X >= 1]
  Estimate mean_pair;         // E[X(X-1)]
};

struct ScanTable {
  std::vector<ScanRow> rows;
  double slope = 0.0;         // log-log fit of the named column vs eta
  double slope_stderr = 0.0;
};

/// counts[r][i] = eigenvalue count of realization r in I_{eta_i}.
ScanTable wegner_scan(const std::vector<std::vector<int>>& counts,
                      const std::vector<double>& eta_list);
ScanTable minami_scan(const std::vector<std::vector<int>>& counts,
                      const std::vector<double>& eta_list);

/// block_counts[r][p] = count of block p in the rescaled interval.
/// Estimates sum_p P{eta^{l,p}(I) >= 2}.
Estimate double_point_rate(const std::vector<std::vector<int>>& block_counts);

Estimate laplace_functional(const std::vector<PointSample>& samples,
                            const TestFunction& f);

/// Paired gap |E exp(-xi[f]) - E exp(-zeta[f])| from common realizations.
Estimate xi_zeta_gap(const std::vector<PointSample>& xi,
                     const std::vector<PointSample>& zeta, const TestFunction& f);

struct DecayFit {
  double gamma = 0.0;         // decay rate, -slope of the log-linear fit
  double gamma_stderr = 0.0;
  double intercept = 0.0;
  std::vector<double> distances;
  std::vector<double> log_means;
  int skipped_realizations = 0;
};

/// Monte Carlo E|[K^-1]_ij|^s binned by site distance, log-linear fit.
DecayFit frac_moment_decay(const DomainSpec& domain, const DistributionSpec& dist,
                           double energy, double s, int realizations,
                           std::uint64_t master_seed, double image_tol = 1e-12,
                           double cond_cap = 1e-12);

struct PoissonReport {
  double ks_spacing = 0.0;       // gap CDF vs Exp(lambda)
  double tv_counts = 0.0;        // count pmf vs Poisson(lambda * |window|)
  double count_correlation = 0;  // counts in the two half-windows
  int gap_count = 0;
  int sample_count = 0;
};

PoissonReport poisson_tests(const std::vector<PointSample>& samples, double lambda,
                            int min_samples = 100);

/// KS distance of a raw gap set against Exp(lambda); poisson_tests uses
/// this on the pooled consecutive spacings.
double ks_exponential(std::vector<double> gaps, double lambda);

/// Ordinary least squares of y against x; returns slope, its standard
/// error, and the intercept.
struct LineFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace deltalab
