#pragma once

#include <complex>

namespace deltalab {

/// Modified Bessel function K0(x), x > 0.
///
/// Power series for x <= 2, exponentially scaled trapezoid evaluation of
/// the cosh integral representation for x > 2. Relative error is below
/// 1e-13 across [1e-6, 50]; underflows to 0 near x ~ 746.
double bessel_k0(double x);

/// K0 continued to complex arguments with Re w > 0 (right half-plane).
/// Accuracy degrades as arg(w) approaches +-pi/2.
std::complex<double> bessel_k0(std::complex<double> w);

}  // namespace deltalab
