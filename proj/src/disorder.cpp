#include "deltalab/disorder.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace deltalab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline std::array<std::uint32_t, 4> philox_round(std::array<std::uint32_t, 4> c,
                                                 std::array<std::uint32_t, 2> k) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kPhiloxM0, c[0], lo0, hi0);
  mulhilo(kPhiloxM1, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

double uniform01(const StreamKey& key) {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(key.site),
      static_cast<std::uint32_t>(key.site >> 32),
      static_cast<std::uint32_t>(key.realization),
      static_cast<std::uint32_t>((key.realization >> 32) & 0xFFFFu) |
          (key.slot << 16)};
  const std::array<std::uint32_t, 2> k = {
      static_cast<std::uint32_t>(key.master_seed),
      static_cast<std::uint32_t>(key.master_seed >> 32)};
  const auto words = philox4x32(counter, k);
  const std::uint64_t mantissa =
      (static_cast<std::uint64_t>(words[0] >> 5) << 26) | (words[1] >> 6);
  return (static_cast<double>(mantissa) + 0.5) * 0x1.0p-53;  // strictly in (0,1)
}

double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("standard_normal_quantile: p outside (0,1)");
  }
  // Acklam's rational approximation ...
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // ... polished with one Halley step on erfc.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

void DistributionSpec::validate() const {
  if (!(a > 0.0) || !(b > a)) {
    throw std::domain_error("distribution support needs 0 < a < b");
  }
  if (kind == DistKind::TruncatedGaussian && !(sigma > 0.0)) {
    throw std::domain_error("truncated gaussian needs sigma > 0");
  }
  if (kind == DistKind::PiecewiseDensity) {
    if (knots.size() < 2 || cell_density.size() + 1 != knots.size()) {
      throw std::domain_error("piecewise density: need k+1 knots for k cells");
    }
    if (std::abs(knots.front() + b) > 1e-12 || std::abs(knots.back() + a) > 1e-12) {
      throw std::domain_error("piecewise density: knots must span [-b, -a]");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (!(knots[i + 1] > knots[i])) {
        throw std::domain_error("piecewise density: knots must ascend");
      }
      if (cell_density[i] < 0.0) {
        throw std::domain_error("piecewise density: negative density");
      }
      mass += cell_density[i] * (knots[i + 1] - knots[i]);
    }
    if (std::abs(mass - 1.0) > 1e-12) {
      throw std::domain_error("piecewise density: must integrate to 1");
    }
  }
}

double DistributionSpec::quantile(double u) const {
  switch (kind) {
    case DistKind::Uniform:
      return -b + (b - a) * u;
    case DistKind::TruncatedGaussian: {
      const double zlo = 0.5 * std::erfc(-(-b - mu) / (sigma * std::sqrt(2.0)));
      const double zhi = 0.5 * std::erfc(-(-a - mu) / (sigma * std::sqrt(2.0)));
      const double p = zlo + u * (zhi - zlo);
      return mu + sigma * standard_normal_quantile(p);
    }
    case DistKind::PiecewiseDensity: {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double cell = cell_density[i] * (knots[i + 1] - knots[i]);
        if (u <= acc + cell || i + 2 == knots.size()) {
          if (cell == 0.0) continue;
          return knots[i] + (u - acc) / cell_density[i];
        }
        acc += cell;
      }
      return -a;
    }
  }
  throw std::logic_error("unreachable");
}

double DistributionSpec::mean() const {
  if (kind == DistKind::Uniform) return -(a + b) / 2.0;
  // 200-point midpoint rule of the quantile function is plenty here.
  double s = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i) s += quantile((i + 0.5) / n);
  return s / n;
}

std::string DistributionSpec::name() const {
  switch (kind) {
    case DistKind::Uniform: return "uniform";
    case DistKind::TruncatedGaussian: return "truncated-gaussian";
    default: return "piecewise";
  }
}

CouplingField sample_couplings(const DistributionSpec& dist, std::size_t sites,
                               std::uint64_t master_seed, std::uint64_t realization) {
  dist.validate();
  CouplingField field;
  field.dist = dist;
  field.master_seed = master_seed;
  field.realization = realization;
  field.values.resize(sites);
  for (std::size_t j = 0; j < sites; ++j) {
    field.values[j] = dist.quantile(uniform01({master_seed, realization, j, 0}));
  }
  return field;
}

CouplingField resample_one(const CouplingField& field, std::size_t site,
                           const DistributionSpec* override_dist, std::uint32_t slot) {
  if (site >= field.values.size()) {
    throw std::out_of_range("resample_one: site index out of range");
  }
  const DistributionSpec& dist = override_dist ? *override_dist : field.dist;
  dist.validate();
  CouplingField out = field;
  out.values[site] =
      dist.quantile(uniform01({field.master_seed, field.realization, site, slot}));
  return out;
}

}  // namespace deltalab
