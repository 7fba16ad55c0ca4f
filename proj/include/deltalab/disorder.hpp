#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace deltalab {

/// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
/// A pure function of (counter, key); no state anywhere.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Addresses one variate: (master_seed, realization, site, slot) -> (0,1).
/// Slot 0 is the primary coupling draw; slot 1 the resampling draw.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t realization = 0;
  std::uint64_t site = 0;
  std::uint32_t slot = 0;
};

double uniform01(const StreamKey& key);

enum class DistKind { Uniform, TruncatedGaussian, PiecewiseDensity };

/// Coupling distribution with support [-b, -a], 0 < a < b, bounded density.
struct DistributionSpec {
  DistKind kind = DistKind::Uniform;
  double a = 1.0;
  double b = 3.0;
  // TruncatedGaussian: location/scale of the parent normal (same axis as omega).
  double mu = -2.0;
  double sigma = 0.5;
  // PiecewiseDensity: breakpoints (ascending, first = -b, last = -a) and
  // one density value per cell; must integrate to 1.
  std::vector<double> knots;
  std::vector<double> cell_density;

  void validate() const;
  double quantile(double u) const;  // inverse CDF, u in (0,1)
  double mean() const;              // exact for Uniform, numeric otherwise
  std::string name() const;
};

struct CouplingField {
  std::vector<double> values;  // one omega per lattice site, all in [-b, -a]
  DistributionSpec dist;
  std::uint64_t master_seed = 0;
  std::uint64_t realization = 0;
};

CouplingField sample_couplings(const DistributionSpec& dist, std::size_t sites,
                               std::uint64_t master_seed, std::uint64_t realization);

/// Copy of the field with site j redrawn (slot 1), optionally from a
/// different (e.g. disjoint-support) distribution.
CouplingField resample_one(const CouplingField& field, std::size_t site,
                           const DistributionSpec* override_dist = nullptr,
                           std::uint32_t slot = 1);

/// Quantile of the standard normal; |error| < 2e-15 via a refined rational
/// approximation. Used by the truncated-Gaussian inverse CDF.
double standard_normal_quantile(double p);

}  // namespace deltalab
