#include <doctest.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <complex>

#include "deltalab/bessel.hpp"

using deltalab::bessel_k0;

TEST_CASE("K0 reference values") {
  // Frozen from high-precision tables / series evaluation.
  CHECK(bessel_k0(1.0) == doctest::Approx(0.421024438241).epsilon(1e-12));
  CHECK(bessel_k0(0.1) == doctest::Approx(2.4270690247).epsilon(1e-12));
  CHECK(bessel_k0(10.0) == doctest::Approx(1.77800623162e-5).epsilon(1e-12));
  CHECK(bessel_k0(2.0) == doctest::Approx(0.1138938727495334).epsilon(1e-13));
  CHECK(bessel_k0(50.0) == doctest::Approx(3.410167749789496e-23).epsilon(1e-12));
}

TEST_CASE("K0 against the GSL implementation across the working range") {
  for (double x = 1e-6; x < 50.0; x *= 1.37) {
    const double ours = bessel_k0(x);
    const double ref = gsl_sf_bessel_K0(x);
    CHECK(std::abs(ours - ref) <= 1e-12 * std::abs(ref));
  }
}

TEST_CASE("K0 domain and underflow behaviour") {
  CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
  CHECK_THROWS_AS(bessel_k0(-1.0), std::domain_error);
  CHECK(bessel_k0(800.0) == 0.0);
  CHECK(bessel_k0(700.0) > 0.0);
}

TEST_CASE("complex K0 matches the real axis and conjugates") {
  for (double x : {0.3, 1.7, 2.5, 8.0}) {
    const std::complex<double> v = bessel_k0(std::complex<double>(x, 0.0));
    CHECK(v.real() == doctest::Approx(bessel_k0(x)).epsilon(1e-12));
    CHECK(std::abs(v.imag()) < 1e-14);
  }
  for (std::complex<double> w : {std::complex<double>(1.0, 0.5),
                                 std::complex<double>(3.0, 2.0),
                                 std::complex<double>(0.4, -0.9)}) {
    const auto a = bessel_k0(w);
    const auto b = bessel_k0(std::conj(w));
    CHECK(std::abs(a - std::conj(b)) < 1e-13 * std::abs(a));
  }
  CHECK_THROWS_AS(bessel_k0(std::complex<double>(-1.0, 2.0)), std::domain_error);
}
