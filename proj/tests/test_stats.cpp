#include <doctest.h>

#include <cmath>

#include "deltalab/ensemble.hpp"
#include "deltalab/stats.hpp"

using namespace deltalab;

namespace {

PointSample sample_of(std::vector<double> pts, double w, std::int64_t id = 0) {
  PointSample s;
  s.realization_id = id;
  s.points = std::move(pts);
  s.halfwidth = w;
  return s;
}

// Synthetic Poisson(lambda) samples on [-w, w] from the counter RNG; the
// oracle for poisson_tests and the Laplace functional.
std::vector<PointSample> synthetic_poisson(double lambda, double w, int n_samples,
                                           std::uint64_t seed) {
  std::vector<PointSample> samples;
  for (int r = 0; r < n_samples; ++r) {
    PointSample s;
    s.realization_id = r;
    s.halfwidth = w;
    // Count by inversion of the Poisson CDF, then iid uniform positions.
    const double mu = lambda * 2.0 * w;
    const double u = uniform01({seed, static_cast<std::uint64_t>(r), 0, 0});
    int count = 0;
    double cdf = std::exp(-mu), pk = cdf;
    while (u > cdf && count < 200) {
      ++count;
      pk *= mu / count;
      cdf += pk;
    }
    for (int i = 0; i < count; ++i) {
      const double v =
          uniform01({seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i + 1), 0});
      s.points.push_back(-w + 2.0 * w * v);
    }
    std::sort(s.points.begin(), s.points.end());
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace

TEST_CASE("build_les: rescaling and bookkeeping") {
  const double volume = 100.0;
  const double w = 5.0;
  const double e0 = -1.0;
  Spectrum spec;
  spec.window_lo = e0 - w / volume;
  spec.window_hi = e0 + w / volume;

  // Empty spectrum -> empty sample.
  CHECK(build_les(spec, 0, e0, volume, w).points.empty());

  // One eigenvalue at exactly E0 -> single point at 0.
  spec.eigenvalues.push_back({e0, 1, 0.0, false});
  CHECK(build_les(spec, 0, e0, volume, w).points[0] == doctest::Approx(0.0));

  // E = E0 + 0.3/|Lambda| -> x = 0.3; and the inverse rescaling recovers E.
  spec.eigenvalues[0].energy = e0 + 0.3 / volume;
  const PointSample s = build_les(spec, 0, e0, volume, w);
  CHECK(s.points[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(e0 + s.points[0] / volume ==
        doctest::Approx(spec.eigenvalues[0].energy).epsilon(1e-12));

  // Multiplicity expansion.
  spec.eigenvalues[0].multiplicity = 3;
  CHECK(build_les(spec, 0, e0, volume, w).points.size() == 3);

  // Window mismatch is rejected.
  spec.window_hi = e0 + 2.0 * w / volume;
  CHECK_THROWS_AS(build_les(spec, 0, e0, volume, w), std::invalid_argument);
}

TEST_CASE("subcube array geometry") {
  const DomainSpec domain = DomainSpec::cube(1, 100, BoundaryCondition::Dirichlet);
  const SubcubeArray array = SubcubeArray::build(domain, 0.5);
  CHECK(array.block_side == 10.0);
  CHECK(array.blocks_per_axis == 10);
  std::size_t covered = 0;
  for (const auto& ids : array.site_index) covered += ids.size();
  CHECK(covered == domain.sites());
  for (const auto& block : array.blocks) {
    CHECK(block.bc == BoundaryCondition::Dirichlet);
    CHECK(block.side == 10.0);
    CHECK(block.sites() == 10);
  }
  // d=2 tiling
  const DomainSpec d2 = DomainSpec::cube(2, 6, BoundaryCondition::Dirichlet);
  const SubcubeArray a2 = SubcubeArray::build(d2, 0.5);
  CHECK(a2.block_side == 3.0);
  CHECK(a2.blocks.size() == 4);
  CHECK_THROWS_AS(SubcubeArray::build(domain, 1.2), std::domain_error);
}

TEST_CASE("zeta with a single block reproduces xi exactly") {
  const DomainSpec domain = DomainSpec::cube(1, 10, BoundaryCondition::Dirichlet);
  const CouplingField omega = sample_couplings({}, domain.sites(), 21, 0);
  // alpha close to 1 keeps l = L (single block).
  const SubcubeArray array = SubcubeArray::build(domain, 0.999);
  CHECK(array.blocks.size() == 1);
  const double e0 = -1.0, w = 8.0;
  const double volume = domain.volume();
  const Spectrum spec =
      solve_spectrum(domain, omega, e0 - w / volume, e0 + w / volume);
  const PointSample xi = build_les(spec, 0, e0, volume, w);
  const PointSample zeta = build_zeta(domain, omega, array, 0, e0, w);
  REQUIRE(xi.points.size() == zeta.points.size());
  for (std::size_t i = 0; i < xi.points.size(); ++i) {
    CHECK(xi.points[i] == doctest::Approx(zeta.points[i]).epsilon(1e-9));
  }
  // And the paired Laplace gap is tiny.
  TestFunction f{{{1.0, 0.0, 1.0}}};
  const Estimate gap = xi_zeta_gap({xi}, {zeta}, f);
  CHECK(gap.value < 1e-9);
}

TEST_CASE("zeta block counts are nearly independent across blocks") {
  const DomainSpec domain = DomainSpec::cube(1, 40, BoundaryCondition::Dirichlet);
  const SubcubeArray array = SubcubeArray::build(domain, 0.5);
  REQUIRE(array.blocks.size() == 8);
  const double e0 = -1.0, w = 20.0;
  const int R = 300;
  std::vector<double> c0(R), c1(R);
  for (int r = 0; r < R; ++r) {
    const CouplingField omega = sample_couplings({}, domain.sites(), 606, r);
    const PointSample zeta = build_zeta(domain, omega, array, r, e0, w);
    // count points per block via position binning is not possible after
    // rescaling; recount per block instead.
    const double volume = domain.volume();
    int k = 0;
    for (std::size_t b = 0; b < 2; ++b) {
      CouplingField restricted;
      restricted.dist = omega.dist;
      for (std::size_t j : array.site_index[b]) {
        restricted.values.push_back(omega.values[j]);
      }
      const Spectrum s = solve_spectrum(array.blocks[b], restricted,
                                        e0 - w / volume, e0 + w / volume);
      (b == 0 ? c0[r] : c1[r]) = static_cast<double>(s.total_multiplicity());
      k += s.total_multiplicity();
    }
    (void)k;
    (void)zeta;
  }
  double m0 = 0.0, m1 = 0.0;
  for (int r = 0; r < R; ++r) {
    m0 += c0[r];
    m1 += c1[r];
  }
  m0 /= R;
  m1 /= R;
  double cov = 0.0, v0 = 0.0, v1 = 0.0;
  for (int r = 0; r < R; ++r) {
    cov += (c0[r] - m0) * (c1[r] - m1);
    v0 += (c0[r] - m0) * (c0[r] - m0);
    v1 += (c1[r] - m1) * (c1[r] - m1);
  }
  const double rho = cov / std::sqrt(v0 * v1);
  CHECK(std::abs(rho) < 0.12);  // ~ 3 / sqrt(R) noise floor
}

TEST_CASE("estimate_dos on the single-site closed form") {
  // One site, omega ~ U[-3,-1]: eigenvalue -omega^2/4 lands in
  // [-1.21, -0.81] iff |omega| in [1.8, 2.2], so E[count] = 0.2.
  DomainSpec domain = DomainSpec::cube_with_lattice(
      1, 40.0, BoundaryCondition::FreeSpace, {Point{{20.0, 0, 0}}});
  const int R = 4000;
  std::vector<int> counts(R);
  for (int r = 0; r < R; ++r) {
    const CouplingField omega = sample_couplings({}, 1, 99, r);
    CountingFunction counter(domain, omega);
    counts[r] = counter(-0.81) - counter(-1.21);
  }
  const Estimate n_hat = estimate_dos(counts, domain.volume(), 0.4);
  const double mean_count = n_hat.value * domain.volume() * 0.4;
  const double se_count = n_hat.stderr_ * domain.volume() * 0.4;
  CHECK(std::abs(mean_count - 0.2) < 3.0 * se_count);
  CHECK_THROWS_AS(estimate_dos({}, 1.0, 0.1), std::runtime_error);
}

TEST_CASE("scan tables: estimator inequalities and synthetic slopes") {
  // P[X >= 1] <= E[X] <= E[X^2] on arbitrary count data.
  std::vector<std::vector<int>> counts = {{0, 1}, {2, 3}, {1, 0}, {4, 2}};
  const std::vector<double> etas = {0.1, 0.2};
  const ScanTable w = wegner_scan(counts, etas);
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double ex = w.rows[i].mean_count.value;
    const double exx1 = w.rows[i].mean_pair.value;
    CHECK(w.rows[i].prob_at_least_one.value <= ex + 1e-12);
    CHECK(ex <= exx1 + ex + 1e-12);  // E[X] <= E[X^2] = E[X(X-1)] + E[X]
  }
  // Exact power laws give exact slopes.
  std::vector<std::vector<int>> power;
  const std::vector<double> eta2 = {0.01, 0.02, 0.04, 0.08};
  for (int r = 0; r < 100; ++r) {
    // mean count proportional to eta: X = k for eta = 0.01 * 2^k blocks
    power.push_back({1, 2, 4, 8});
  }
  const ScanTable t = wegner_scan(power, eta2);
  CHECK(t.slope == doctest::Approx(1.0).epsilon(1e-12));

  // Single site: X <= 1 so X(X-1) = 0 identically.
  std::vector<std::vector<int>> single(50, std::vector<int>{1, 0});
  const ScanTable m = minami_scan(single, {0.1, 0.2});
  CHECK(m.rows[0].mean_pair.value == 0.0);
  CHECK(m.rows[1].mean_pair.value == 0.0);
}

TEST_CASE("double point rate") {
  // Blocks with <= 1 point contribute zero.
  std::vector<std::vector<int>> ones(10, std::vector<int>{1, 0, 1});
  CHECK(double_point_rate(ones).value == 0.0);
  std::vector<std::vector<int>> mixed = {{2, 0}, {0, 0}, {3, 2}, {1, 1}};
  CHECK(double_point_rate(mixed).value == doctest::Approx((1.0 + 0.0 + 2.0 + 0.0) / 4.0));
}

TEST_CASE("laplace functional") {
  TestFunction f{{{1.0, 0.0, 1.0}}};
  // All samples empty -> exactly 1.
  CHECK(laplace_functional({sample_of({}, 5), sample_of({}, 5)}, f).value == 1.0);
  // Single point at sigma: f(sigma) = a/tau.
  TestFunction g{{{0.8, 1.5, 2.0}}};
  const Estimate e = laplace_functional({sample_of({1.5}, 5)}, g);
  CHECK(e.value == doctest::Approx(std::exp(-0.8 / 2.0)).epsilon(1e-14));
  // Class-A constraints enforced.
  TestFunction bad;
  CHECK_THROWS_AS(laplace_functional({sample_of({}, 5)}, bad), std::domain_error);
  bad.terms = {{-1.0, 0.0, 1.0}};
  CHECK_THROWS_AS(laplace_functional({sample_of({}, 5)}, bad), std::domain_error);
}

TEST_CASE("laplace functional against the Poisson closed form") {
  const double lambda = 0.7, w = 6.0;
  const auto samples = synthetic_poisson(lambda, w, 20000, 888);
  TestFunction f{{{1.0, 0.5, 1.2}}};
  const Estimate got = laplace_functional(samples, f);
  // E exp(-xi[f]) = exp(-lambda int (1 - e^{-f})) for a Poisson process;
  // Simpson quadrature on [-w, w].
  const int n = 4000;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -w + 2.0 * w * i / n;
    const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    integral += weight * (1.0 - std::exp(-f(x)));
  }
  integral *= (2.0 * w / n) / 3.0;
  const double expected = std::exp(-lambda * integral);
  CHECK(std::abs(got.value - expected) < 3.0 * got.stderr_);
}

TEST_CASE("xi_zeta_gap pairing errors") {
  TestFunction f{{{1.0, 0.0, 1.0}}};
  auto a = sample_of({0.1}, 5, 0);
  auto b = sample_of({0.1}, 5, 1);
  CHECK_THROWS_AS(xi_zeta_gap({a}, {b}, f), std::invalid_argument);
  CHECK_THROWS_AS(xi_zeta_gap({}, {}, f), std::invalid_argument);
}

TEST_CASE("poisson_tests: synthetic self-test and worked examples") {
  // The window must hold enough points that the fixed-window conditioning
  // bias of the gap law stays below the thresholds.
  const auto samples = synthetic_poisson(1.0, 12.5, 10000, 777);
  const PoissonReport rep = poisson_tests(samples, 1.0);
  CHECK(rep.ks_spacing < 0.02);
  CHECK(rep.tv_counts < 0.02);
  CHECK(std::abs(rep.count_correlation) < 0.03);

  // Single spacing ln 2 against Exp(1): the KS distance is exactly 1/2.
  CHECK(ks_exponential({std::log(2.0)}, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  const PoissonReport one =
      poisson_tests({sample_of({0.0, std::log(2.0)}, 5.0)}, 1.0, 1);
  CHECK(one.ks_spacing == doctest::Approx(0.5).epsilon(1e-12));

  // Empty samples against a zero-intensity window: TV = 0.
  const PoissonReport empty =
      poisson_tests({sample_of({}, 5.0), sample_of({}, 5.0)}, 0.0, 1);
  CHECK(empty.tv_counts == 0.0);

  CHECK_THROWS_AS(poisson_tests(samples, 1.0, 20000), std::runtime_error);
}

TEST_CASE("uana negligibility: max_p P(block count >= 1) falls with L") {
  // Fixed rescaled interval; block occupation decays like l/L.
  const double e0 = -1.0, w = 4.0;
  double prev = 1.0;
  for (long side : {64L, 144L, 256L}) {
    const DomainSpec domain = DomainSpec::cube(1, static_cast<double>(side),
                                               BoundaryCondition::Dirichlet);
    const SubcubeArray array = SubcubeArray::build(domain, 0.5);
    const double volume = domain.volume();
    const int R = 600;
    std::vector<int> hits(array.blocks.size(), 0);
    for (int r = 0; r < R; ++r) {
      const CouplingField omega = sample_couplings({}, domain.sites(), 4040, r);
      for (std::size_t b = 0; b < array.blocks.size(); ++b) {
        CouplingField restricted;
        restricted.dist = omega.dist;
        for (std::size_t j : array.site_index[b]) {
          restricted.values.push_back(omega.values[j]);
        }
        CountingFunction counter(array.blocks[b], restricted);
        const int c =
            counter(e0 + w / volume) - counter(e0 - w / volume);
        if (c >= 1) hits[b] += 1;
      }
    }
    double max_p = 0.0;
    for (std::size_t b = 0; b < hits.size(); ++b) {
      max_p = std::max(max_p, hits[b] / static_cast<double>(R));
    }
    CHECK(max_p < prev);
    prev = max_p;
  }
}

TEST_CASE("line fit recovers slope and uncertainty") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 2.0 * i);
  }
  const LineFit fit = fit_line(x, y);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(fit.slope_stderr == doctest::Approx(0.0));
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), std::invalid_argument);
}
