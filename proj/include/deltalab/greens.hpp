#pragma once

#include <complex>

namespace deltalab {

using Complex = std::complex<double>;

/// Spectral parameter kappa = sqrt(-z) with Re kappa > 0, defined for
/// energies z off the closed positive real axis. All kernels below are
/// written in terms of kappa so that they decay exponentially.
struct SpectralParam {
  Complex z;
  Complex kappa;

  bool is_real() const { return z.imag() == 0.0; }
  double kappa_real() const { return kappa.real(); }
};

/// Maps z to kappa. Throws std::domain_error for z on [0, inf).
SpectralParam kappa(Complex z);

/// Builds the parameter directly from kappa > 0 (real energies E = -kappa^2).
SpectralParam from_kappa(double kappa_value);

/// Free-space Green's function g_d(r; kappa) of -Laplacian - z on R^d:
///   d=1: exp(-kappa r) / (2 kappa)      (finite at r = 0)
///   d=2: K0(kappa r) / (2 pi)           (r > 0)
///   d=3: exp(-kappa r) / (4 pi r)       (r > 0)
Complex free_green(int dim, double r, const SpectralParam& sp);
double free_green_real(int dim, double r, double kappa_value);

/// Renormalized on-site energy e_d(z):
///   e1 = -1/(2 kappa),  e2 = log(kappa)/(2 pi),  e3 = -kappa/(4 pi).
Complex effective_energy(int dim, const SpectralParam& sp);
double effective_energy_real(int dim, double kappa_value);

/// Scalar subtracted from the K-matrix diagonal, i.e. the value e with
/// K = t + v - e I. Differs from effective_energy by a sign in d=1, where
/// the calibrated diagonal reads -1/omega - 1/(2 kappa).
Complex diagonal_shift(int dim, const SpectralParam& sp);
double diagonal_shift_real(int dim, double kappa_value);

}  // namespace deltalab
