#include "deltalab/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace deltalab {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;

// K0(w) = -(log(w/2) + gamma) I0(w) + sum_{k>=1} H_k (w^2/4)^k / (k!)^2.
// Converges fast for |w| <= 2; all coefficients positive, so no
// cancellation on the real axis.
template <typename T>
T k0_series(T w) {
  const T q = w * w * 0.25;
  T i0(1.0), aux(0.0);
  T term(1.0);
  double harmonic = 0.0;
  for (int k = 1; k < 40; ++k) {
    term *= q / static_cast<double>(k * k);
    harmonic += 1.0 / k;
    i0 += term;
    aux += term * harmonic;
    if (std::abs(term) < 1e-18 * (std::abs(i0) + 1.0)) break;
  }
  return -(std::log(w * 0.5) + kEulerGamma) * i0 + aux;
}

// exp(w) K0(w) = int_0^inf exp(-w (cosh t - 1)) dt, Re w > 0.
// The integrand decays double-exponentially, so the trapezoid rule is
// spectrally accurate; h is refined until two levels agree.
template <typename T>
T k0_integral_scaled(T w) {
  const double re = std::real(std::complex<double>(w));
  // Truncate where the integrand is below ~1e-21 of its peak.
  const double tmax = std::acosh(1.0 + 48.0 / re);
  auto f = [&](double t) { return std::exp(-w * (std::cosh(t) - 1.0)); };
  double h = 0.5;
  T sum = f(0.0) * 0.5;
  for (double t = h; t <= tmax; t += h) sum += f(t);
  T value = sum * h;
  for (int level = 0; level < 6; ++level) {
    h *= 0.5;
    T odd(0.0);
    for (double t = h; t <= tmax; t += 2.0 * h) odd += f(t);
    sum += odd;
    T refined = sum * h;
    if (std::abs(refined - value) <= 1e-15 * std::abs(refined)) {
      return refined;
    }
    value = refined;
  }
  return value;
}

}  // namespace

double bessel_k0(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k0: argument must be > 0");
  if (x <= 2.0) return k0_series(x);
  if (x > 745.0) return 0.0;  // exp(-x) underflows
  return std::exp(-x) * k0_integral_scaled(x);
}

std::complex<double> bessel_k0(std::complex<double> w) {
  if (!(w.real() > 0.0)) {
    throw std::domain_error("bessel_k0: complex argument needs Re w > 0");
  }
  if (std::abs(w) <= 2.0) return k0_series(w);
  if (w.real() > 745.0) return {0.0, 0.0};
  return std::exp(-w) * k0_integral_scaled(w);
}

}  // namespace deltalab
