#include <doctest.h>

#include <cmath>

#include "deltalab/disorder.hpp"
#include "deltalab/linalg.hpp"

using namespace deltalab;

TEST_CASE("inertia of a known indefinite matrix") {
  // diag(2, -3, 5) in a rotated basis keeps inertia (1 neg, 2 pos).
  std::vector<double> a = {2.0, 1.0, 0.0, 1.0, -3.0, 0.5, 0.0, 0.5, 5.0};
  const auto f = SymmetricFactor::compute(a, 3);
  const Inertia inertia = f.inertia();
  CHECK(inertia.negative == 1);
  CHECK(inertia.positive == 2);
  CHECK(inertia.zero == 0);
}

TEST_CASE("factor solves against a direct 2x2 inverse") {
  std::vector<double> a = {3.0, 1.0, 1.0, 2.0};
  const auto f = SymmetricFactor::compute(a, 2);
  std::vector<double> rhs = {1.0, 0.0};
  f.solve(rhs);
  // inverse of [[3,1],[1,2]] is [[2,-1],[-1,3]]/5
  CHECK(rhs[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(rhs[1] == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(f.rcond(one_norm_symmetric(a, 2)) > 0.1);
}

TEST_CASE("complex symmetric solve") {
  std::vector<std::complex<double>> a = {{2.0, 1.0}, {1.0, 0.0}, {1.0, 0.0}, {-3.0, 2.0}};
  const auto f = ComplexSymmetricFactor::compute(a, 2);
  std::vector<std::complex<double>> rhs = {{1.0, 0.0}, {0.0, 0.0}};
  f.solve(rhs);
  // Verify K x = e_0 by direct multiplication.
  const std::complex<double> r0 = a[0] * rhs[0] + a[2] * rhs[1];
  const std::complex<double> r1 = a[1] * rhs[0] + a[3] * rhs[1];
  CHECK(std::abs(r0 - 1.0) < 1e-14);
  CHECK(std::abs(r1) < 1e-14);
}

TEST_CASE("eigenvalues and eigensystem agree") {
  std::vector<double> a = {2.0, 1.0, 0.0, 1.0, -3.0, 0.5, 0.0, 0.5, 5.0};
  const auto w = symmetric_eigenvalues(a, 3);
  const auto sys = symmetric_eigensystem(a, 3);
  for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(sys.values[i]));
  // Residual ||A v - lambda v|| for each pair.
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      double av = 0.0;
      for (int j = 0; j < 3; ++j) av += a[i + j * 3] * sys.vectors[j + k * 3];
      CHECK(av == doctest::Approx(sys.values[k] * sys.vectors[i + k * 3]).epsilon(1e-10));
    }
  }
}

TEST_CASE("smallest eigenvalue by magnitude is signed") {
  // diag(0.05, -2, 7): nearest zero is +0.05.
  std::vector<double> a(9, 0.0);
  a[0] = 0.05;
  a[4] = -2.0;
  a[8] = 7.0;
  const auto f = SymmetricFactor::compute(a, 3);
  CHECK(smallest_eigenvalue_by_magnitude(f) == doctest::Approx(0.05).epsilon(1e-12));
  a[0] = -0.031;
  const auto g = SymmetricFactor::compute(a, 3);
  CHECK(smallest_eigenvalue_by_magnitude(g) == doctest::Approx(-0.031).epsilon(1e-12));
}

TEST_CASE("singular matrices are reported") {
  std::vector<double> a = {1.0, 1.0, 1.0, 1.0};  // rank one
  const auto f = SymmetricFactor::compute(a, 2);
  CHECK((f.singular() || f.inertia(1e-14 * 2.0).zero > 0));
}

TEST_CASE("banded slicing factorization agrees with the dense inertia") {
  // Random banded symmetric matrices checked against dsytrf.
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 40, b = 7;
    BandedMatrix m;
    m.n = n;
    m.bandwidth = b;
    m.a.assign(static_cast<std::size_t>(b + 1) * n, 0.0);
    std::vector<double> dense(n * n, 0.0);
    for (int j = 0; j < n; ++j) {
      for (int i = j; i <= std::min(n - 1, j + b); ++i) {
        const double v =
            2.0 * deltalab::uniform01(
                      {77, static_cast<std::uint64_t>(trial),
                       static_cast<std::uint64_t>(i * n + j), 0}) -
            1.0;
        const double entry = i == j ? 3.0 * v : v;
        m.a[(i - j) + j * (b + 1)] = entry;
        dense[i + j * n] = entry;
        dense[j + i * n] = entry;
      }
    }
    m.one_norm = one_norm_symmetric(dense, n);
    const BandedFactor bf = BandedFactor::compute(m, 1e-13 * m.one_norm);
    if (bf.breakdown()) continue;
    const auto df = SymmetricFactor::compute(dense, n);
    const Inertia di = df.inertia();
    CHECK(bf.inertia().negative == di.negative);
    CHECK(bf.inertia().positive == di.positive);
    // The banded solve inverts the matrix.
    std::vector<double> rhs(n, 0.0);
    rhs[3] = 1.0;
    std::vector<double> x = rhs;
    bf.solve(x);
    std::vector<double> y = rhs;
    df.solve(y);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-9));
  }
}
