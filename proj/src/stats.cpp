#include "deltalab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace deltalab {

namespace {

Estimate mean_and_stderr(const std::vector<double>& xs) {
  if (xs.empty()) throw std::runtime_error("estimate over an empty ensemble");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var = xs.size() > 1 ? var / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

PointSample build_les(const Spectrum& spectrum, std::int64_t realization_id, double e0,
                      double volume, double halfwidth) {
  const double phys_half = halfwidth / volume;
  const double tol = 1e-9 * phys_half + 1e-15;
  if (std::abs(spectrum.window_lo - (e0 - phys_half)) > tol ||
      std::abs(spectrum.window_hi - (e0 + phys_half)) > tol) {
    throw std::invalid_argument(
        "build_les: spectrum window does not match [E0 - w/V, E0 + w/V]");
  }
  PointSample sample;
  sample.realization_id = realization_id;
  sample.e0 = e0;
  sample.halfwidth = halfwidth;
  for (double e : spectrum.expanded()) {
    sample.points.push_back(volume * (e - e0));
  }
  std::sort(sample.points.begin(), sample.points.end());
  return sample;
}

SubcubeArray SubcubeArray::build(const DomainSpec& domain, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::domain_error("subcube array: alpha must be in (0, 1)");
  }
  const long side = std::lround(domain.side);
  if (std::abs(domain.side - side) > 1e-9 || side < 1) {
    throw std::domain_error("subcube array: integer side required");
  }
  const long target = static_cast<long>(std::ceil(std::pow(domain.side, alpha)));
  long block = 1;
  for (long d = 1; d <= std::min(side, target); ++d) {
    if (side % d == 0) block = d;
  }
  SubcubeArray array;
  array.alpha = alpha;
  array.block_side = static_cast<double>(block);
  array.blocks_per_axis = static_cast<int>(side / block);
  const int nb = array.blocks_per_axis;
  const int dim = domain.dimension;
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= nb;

  std::vector<std::vector<Point>> lattices(total);
  array.site_index.assign(total, {});
  for (std::size_t j = 0; j < domain.lattice.size(); ++j) {
    const Point& p = domain.lattice[j];
    int flat = 0;
    Point local;
    for (int i = dim - 1; i >= 0; --i) {
      int cell = static_cast<int>(std::floor(p.c[i] / block));
      cell = std::clamp(cell, 0, nb - 1);
      flat = flat * nb + cell;
      local.c[i] = p.c[i] - cell * static_cast<double>(block);
      if (local.c[i] < 0.5 - 1e-9 || local.c[i] > block - 0.5 + 1e-9) {
        throw std::domain_error("subcube array: a site violates the block margin");
      }
    }
    lattices[flat].push_back(local);
    array.site_index[flat].push_back(j);
  }
  for (int b = 0; b < total; ++b) {
    array.blocks.push_back(DomainSpec::cube_with_lattice(
        dim, static_cast<double>(block), BoundaryCondition::Dirichlet,
        std::move(lattices[b])));
  }
  return array;
}

PointSample build_zeta(const DomainSpec& domain, const CouplingField& omega,
                       const SubcubeArray& array, std::int64_t realization_id,
                       double e0, double halfwidth, const SolveOptions& opts) {
  if (omega.values.size() != domain.lattice.size()) {
    throw std::invalid_argument("build_zeta: coupling field does not match lattice");
  }
  const double volume = domain.volume();
  const double phys_half = halfwidth / volume;
  PointSample sample;
  sample.realization_id = realization_id;
  sample.e0 = e0;
  sample.halfwidth = halfwidth;
  for (std::size_t b = 0; b < array.blocks.size(); ++b) {
    CouplingField restricted;
    restricted.dist = omega.dist;
    restricted.master_seed = omega.master_seed;
    restricted.realization = omega.realization;
    for (std::size_t j : array.site_index[b]) {
      restricted.values.push_back(omega.values[j]);
    }
    if (restricted.values.empty()) continue;
    const Spectrum spec =
        solve_spectrum(array.blocks[b], restricted, e0 - phys_half, e0 + phys_half, opts);
    for (double e : spec.expanded()) {
      sample.points.push_back(volume * (e - e0));
    }
  }
  std::sort(sample.points.begin(), sample.points.end());
  return sample;
}

void TestFunction::validate() const {
  if (terms.empty()) {
    throw std::domain_error("test function: need at least one term");
  }
  for (const Term& t : terms) {
    if (!(t.a > 0.0) || !(t.tau > 0.0)) {
      throw std::domain_error("test function: need a > 0 and tau > 0");
    }
  }
}

double TestFunction::operator()(double x) const {
  double s = 0.0;
  for (const Term& t : terms) {
    const double d = x - t.sigma;
    s += t.a * t.tau / (d * d + t.tau * t.tau);
  }
  return s;
}

Estimate estimate_dos(const std::vector<int>& window_counts, double volume,
                      double delta) {
  if (window_counts.empty()) throw std::runtime_error("estimate_dos: empty ensemble");
  if (!(delta > 0.0)) throw std::domain_error("estimate_dos: delta must be positive");
  std::vector<double> xs(window_counts.begin(), window_counts.end());
  Estimate e = mean_and_stderr(xs);
  const double scale = 1.0 / (volume * delta);
  return {e.value * scale, e.stderr_ * scale};
}

namespace {

ScanTable scan_impl(const std::vector<std::vector<int>>& counts,
                    const std::vector<double>& eta_list, bool pair_column) {
  if (counts.empty()) throw std::runtime_error("scan: empty ensemble");
  ScanTable table;
  std::vector<double> log_eta, log_mean;
  for (std::size_t i = 0; i < eta_list.size(); ++i) {
    std::vector<double> xs, pairs, ge1;
    xs.reserve(counts.size());
    for (const auto& row : counts) {
      const double x = row.at(i);
      xs.push_back(x);
      pairs.push_back(x * (x - 1.0));
      ge1.push_back(x >= 1 ? 1.0 : 0.0);
    }
    ScanRow row;
    row.eta = eta_list[i];
    row.mean_count = mean_and_stderr(xs);
    row.prob_at_least_one = mean_and_stderr(ge1);
    row.mean_pair = mean_and_stderr(pairs);
    table.rows.push_back(row);
    const double y = pair_column ? row.mean_pair.value : row.mean_count.value;
    if (y > 0.0) {
      log_eta.push_back(std::log(eta_list[i]));
      log_mean.push_back(std::log(y));
    }
  }
  if (log_eta.size() >= 2) {
    const LineFit fit = fit_line(log_eta, log_mean);
    table.slope = fit.slope;
    table.slope_stderr = fit.slope_stderr;
  } else {
    table.slope = std::numeric_limits<double>::quiet_NaN();
    table.slope_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return table;
}

}  // namespace

ScanTable wegner_scan(const std::vector<std::vector<int>>& counts,
                      const std::vector<double>& eta_list) {
  return scan_impl(counts, eta_list, /*pair_column=*/false);
}

ScanTable minami_scan(const std::vector<std::vector<int>>& counts,
                      const std::vector<double>& eta_list) {
  return scan_impl(counts, eta_list, /*pair_column=*/true);
}

Estimate double_point_rate(const std::vector<std::vector<int>>& block_counts) {
  if (block_counts.empty()) throw std::runtime_error("double_point_rate: empty ensemble");
  std::vector<double> layered;
  layered.reserve(block_counts.size());
  for (const auto& row : block_counts) {
    double y = 0.0;
    for (int c : row) {
      if (c >= 2) y += 1.0;
    }
    layered.push_back(y);
  }
  return mean_and_stderr(layered);
}

Estimate laplace_functional(const std::vector<PointSample>& samples,
                            const TestFunction& f) {
  f.validate();
  if (samples.empty()) throw std::runtime_error("laplace_functional: empty ensemble");
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (const PointSample& s : samples) {
    double acc = 0.0;
    for (double x : s.points) acc += f(x);
    xs.push_back(std::exp(-acc));
  }
  return mean_and_stderr(xs);
}

Estimate xi_zeta_gap(const std::vector<PointSample>& xi,
                     const std::vector<PointSample>& zeta, const TestFunction& f) {
  f.validate();
  if (xi.size() != zeta.size() || xi.empty()) {
    throw std::invalid_argument("xi_zeta_gap: sample sets must pair up");
  }
  std::vector<double> diffs;
  diffs.reserve(xi.size());
  for (std::size_t r = 0; r < xi.size(); ++r) {
    if (xi[r].realization_id != zeta[r].realization_id) {
      throw std::invalid_argument("xi_zeta_gap: realization ids do not pair up");
    }
    double fx = 0.0, fz = 0.0;
    for (double x : xi[r].points) fx += f(x);
    for (double x : zeta[r].points) fz += f(x);
    diffs.push_back(std::exp(-fx) - std::exp(-fz));
  }
  Estimate e = mean_and_stderr(diffs);
  return {std::abs(e.value), e.stderr_};
}

DecayFit frac_moment_decay(const DomainSpec& domain, const DistributionSpec& dist,
                           double energy, double s, int realizations,
                           std::uint64_t master_seed, double image_tol,
                           double cond_cap) {
  if (!(s > 0.0) || !(s < 1.0)) {
    throw std::domain_error("frac_moment_decay: s must lie in (0,1)");
  }
  if (!(energy < 0.0)) throw std::domain_error("frac_moment_decay: need Re z < 0");
  const int n = static_cast<int>(domain.sites());
  std::map<long, std::pair<double, long>> bins;  // rounded distance -> (sum, count)
  DecayFit fit;
  for (int r = 0; r < realizations; ++r) {
    const CouplingField omega = sample_couplings(dist, n, master_seed, r);
    std::vector<double> inv;
    try {
      inv = k_inverse_real(assemble_real(domain, omega, energy, image_tol), n, cond_cap);
    } catch (const SingularMatrixError&) {
      ++fit.skipped_realizations;
      continue;
    }
    for (int j = 0; j < n; ++j) {
      for (int i = j + 1; i < n; ++i) {
        const double d = distance(domain.lattice[i], domain.lattice[j], domain.dimension);
        if (d > domain.side / 2.0) continue;  // boundary-dominated tails
        const long key = std::lround(d * 1e6);
        auto& bin = bins[key];
        bin.first += std::pow(std::abs(inv[i + static_cast<std::size_t>(j) * n]), s);
        bin.second += 1;
      }
    }
  }
  for (const auto& [key, bin] : bins) {
    fit.distances.push_back(static_cast<double>(key) * 1e-6);
    fit.log_means.push_back(std::log(bin.first / bin.second));
  }
  if (fit.distances.size() < 2) {
    throw std::runtime_error("frac_moment_decay: not enough distance bins");
  }
  const LineFit line = fit_line(fit.distances, fit.log_means);
  fit.gamma = -line.slope;
  fit.gamma_stderr = line.slope_stderr;
  fit.intercept = line.intercept;
  return fit;
}

double ks_exponential(std::vector<double> gaps, double lambda) {
  if (gaps.empty()) throw std::runtime_error("ks_exponential: no gaps");
  std::sort(gaps.begin(), gaps.end());
  const double n = static_cast<double>(gaps.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double cdf = 1.0 - std::exp(-lambda * gaps[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return ks;
}

PoissonReport poisson_tests(const std::vector<PointSample>& samples, double lambda,
                            int min_samples) {
  if (static_cast<int>(samples.size()) < min_samples) {
    throw std::runtime_error("poisson_tests: not enough samples");
  }
  if (!(lambda >= 0.0)) throw std::domain_error("poisson_tests: lambda must be >= 0");
  PoissonReport report;
  report.sample_count = static_cast<int>(samples.size());
  const double w = samples.front().halfwidth;

  std::vector<double> gaps;
  std::vector<double> left, right;
  std::vector<int> counts;
  int max_count = 0;
  for (const PointSample& s : samples) {
    if (std::abs(s.halfwidth - w) > 1e-9) {
      throw std::invalid_argument("poisson_tests: samples from different windows");
    }
    for (std::size_t i = 1; i < s.points.size(); ++i) {
      gaps.push_back(s.points[i] - s.points[i - 1]);
    }
    int l = 0, r = 0;
    for (double x : s.points) (x < 0.0 ? l : r) += 1;
    left.push_back(l);
    right.push_back(r);
    counts.push_back(l + r);
    max_count = std::max(max_count, l + r);
  }
  report.gap_count = static_cast<int>(gaps.size());

  if (!gaps.empty() && lambda > 0.0) {
    report.ks_spacing = ks_exponential(gaps, lambda);
  } else if (lambda > 0.0) {
    throw std::runtime_error("poisson_tests: no spacings to test");
  }

  // Total variation against Poisson(lambda * 2w).
  const double mu = lambda * 2.0 * w;
  std::vector<double> pmf_hat(max_count + 1, 0.0);
  for (int c : counts) pmf_hat[c] += 1.0 / counts.size();
  double tv = 0.0;
  double poisson_mass = 0.0;
  double pk = std::exp(-mu);  // k = 0
  for (int k = 0; k <= max_count; ++k) {
    tv += std::abs(pmf_hat[k] - pk);
    poisson_mass += pk;
    pk *= mu / (k + 1);
  }
  tv += 1.0 - poisson_mass;  // Poisson tail beyond the observed maximum
  report.tv_counts = 0.5 * tv;

  // Pearson correlation of the half-window counts.
  const double nl = left.size();
  double ml = 0.0, mr = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    ml += left[i];
    mr += right[i];
  }
  ml /= nl;
  mr /= nl;
  double sll = 0.0, srr = 0.0, slr = 0.0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    sll += (left[i] - ml) * (left[i] - ml);
    srr += (right[i] - mr) * (right[i] - mr);
    slr += (left[i] - ml) * (right[i] - mr);
  }
  report.count_correlation = sll > 0.0 && srr > 0.0 ? slr / std::sqrt(sll * srr) : 0.0;
  return report;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least two points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ssr += e * e;
  }
  fit.slope_stderr =
      x.size() > 2 ? std::sqrt(ssr / (n - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace deltalab
