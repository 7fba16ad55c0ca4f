#include "deltalab/greens.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deltalab/bessel.hpp"

namespace deltalab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::domain_error("dimension must be 1, 2 or 3");
}
}  // namespace

SpectralParam kappa(Complex z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) {
    throw std::domain_error("kappa: z on the closed positive real axis");
  }
  Complex k;
  if (z.imag() == 0.0) {
    k = Complex(std::sqrt(-z.real()), 0.0);  // exact for real z < 0
  } else {
    k = std::sqrt(-z);  // principal branch, Re > 0 off the cut
  }
  return {z, k};
}

SpectralParam from_kappa(double kappa_value) {
  if (!(kappa_value > 0.0)) throw std::domain_error("from_kappa: kappa must be > 0");
  return {Complex(-kappa_value * kappa_value, 0.0), Complex(kappa_value, 0.0)};
}

Complex free_green(int dim, double r, const SpectralParam& sp) {
  check_dim(dim);
  if (sp.is_real()) return {free_green_real(dim, r, sp.kappa.real()), 0.0};
  const Complex k = sp.kappa;
  switch (dim) {
    case 1:
      if (r < 0.0) throw std::domain_error("free_green: r < 0");
      return std::exp(-k * r) / (2.0 * k);
    case 2:
      if (!(r > 0.0)) throw std::domain_error("free_green: d=2 kernel singular at r=0");
      return bessel_k0(k * r) / kTwoPi;
    default:
      if (!(r > 0.0)) throw std::domain_error("free_green: d=3 kernel singular at r=0");
      return std::exp(-k * r) / (kFourPi * r);
  }
}

double free_green_real(int dim, double r, double kappa_value) {
  switch (dim) {
    case 1:
      if (r < 0.0) throw std::domain_error("free_green: r < 0");
      return std::exp(-kappa_value * r) / (2.0 * kappa_value);
    case 2:
      if (!(r > 0.0)) throw std::domain_error("free_green: d=2 kernel singular at r=0");
      return bessel_k0(kappa_value * r) / kTwoPi;
    default:
      if (!(r > 0.0)) throw std::domain_error("free_green: d=3 kernel singular at r=0");
      return std::exp(-kappa_value * r) / (kFourPi * r);
  }
}

Complex effective_energy(int dim, const SpectralParam& sp) {
  check_dim(dim);
  const Complex k = sp.kappa;
  switch (dim) {
    case 1: return -1.0 / (2.0 * k);
    case 2: return std::log(k) / kTwoPi;
    default: return -k / kFourPi;
  }
}

double effective_energy_real(int dim, double kappa_value) {
  switch (dim) {
    case 1: return -1.0 / (2.0 * kappa_value);
    case 2: return std::log(kappa_value) / kTwoPi;
    default: return -kappa_value / kFourPi;
  }
}

Complex diagonal_shift(int dim, const SpectralParam& sp) {
  Complex e = effective_energy(dim, sp);
  return dim == 1 ? -e : e;
}

double diagonal_shift_real(int dim, double kappa_value) {
  double e = effective_energy_real(dim, kappa_value);
  return dim == 1 ? -e : e;
}

}  // namespace deltalab
