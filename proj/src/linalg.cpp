#include "deltalab/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

extern "C" void openblas_set_num_threads(int);

namespace deltalab {

void set_blas_threads(int n) { openblas_set_num_threads(n); }

SymmetricFactor SymmetricFactor::compute(std::vector<double> a, int n) {
  SymmetricFactor f;
  f.n_ = n;
  f.a_ = std::move(a);
  f.ipiv_.resize(n);
  f.info_ = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, f.a_.data(), n, f.ipiv_.data());
  if (f.info_ < 0) throw std::runtime_error("dsytrf: bad argument");
  return f;
}

Inertia SymmetricFactor::inertia(double zero_tol) const {
  Inertia result;
  auto classify = [&](double lambda) {
    if (std::abs(lambda) <= zero_tol) {
      ++result.zero;
    } else if (lambda < 0.0) {
      ++result.negative;
    } else {
      ++result.positive;
    }
  };
  int k = 0;
  while (k < n_) {
    if (ipiv_[k] > 0) {
      classify(a_[k + k * n_]);
      ++k;
    } else {
      // 2x2 pivot block: diag (d1, d2), off-diagonal e at (k+1, k).
      const double d1 = a_[k + k * n_];
      const double d2 = a_[(k + 1) + (k + 1) * n_];
      const double e = a_[(k + 1) + k * n_];
      const double tr = d1 + d2;
      const double disc = std::sqrt(std::max(0.0, (d1 - d2) * (d1 - d2) + 4.0 * e * e));
      classify(0.5 * (tr + disc));
      classify(0.5 * (tr - disc));
      k += 2;
    }
  }
  return result;
}

void SymmetricFactor::solve(std::vector<double>& rhs) const { solve_many(rhs, 1); }

void SymmetricFactor::solve_many(std::vector<double>& rhs, int nrhs) const {
  if (singular()) {
    throw SingularMatrixError("dsytrs: factor has an exactly singular block", 0.0);
  }
  const lapack_int info =
      LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n_, nrhs, a_.data(), n_,
                     ipiv_.data(), rhs.data(), n_);
  if (info != 0) throw std::runtime_error("dsytrs failed");
}

double SymmetricFactor::rcond(double one_norm) const {
  if (singular()) return 0.0;
  double rc = 0.0;
  const lapack_int info = LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', n_, a_.data(), n_,
                                         ipiv_.data(), one_norm, &rc);
  if (info != 0) throw std::runtime_error("dsycon failed");
  return rc;
}

ComplexSymmetricFactor ComplexSymmetricFactor::compute(std::vector<std::complex<double>> a,
                                                       int n) {
  ComplexSymmetricFactor f;
  f.n_ = n;
  f.a_ = std::move(a);
  f.ipiv_.resize(n);
  f.info_ = LAPACKE_zsytrf(LAPACK_COL_MAJOR, 'L', n,
                           reinterpret_cast<lapack_complex_double*>(f.a_.data()), n,
                           f.ipiv_.data());
  if (f.info_ < 0) throw std::runtime_error("zsytrf: bad argument");
  return f;
}

void ComplexSymmetricFactor::solve(std::vector<std::complex<double>>& rhs) const {
  solve_many(rhs, 1);
}

void ComplexSymmetricFactor::solve_many(std::vector<std::complex<double>>& rhs,
                                        int nrhs) const {
  if (singular()) {
    throw SingularMatrixError("zsytrs: factor has an exactly singular block", 0.0);
  }
  const lapack_int info =
      LAPACKE_zsytrs(LAPACK_COL_MAJOR, 'L', n_, nrhs,
                     reinterpret_cast<const lapack_complex_double*>(a_.data()), n_,
                     ipiv_.data(),
                     reinterpret_cast<lapack_complex_double*>(rhs.data()), n_);
  if (info != 0) throw std::runtime_error("zsytrs failed");
}

double ComplexSymmetricFactor::rcond(double one_norm) const {
  if (singular()) return 0.0;
  double rc = 0.0;
  const lapack_int info =
      LAPACKE_zsycon(LAPACK_COL_MAJOR, 'L', n_,
                     reinterpret_cast<const lapack_complex_double*>(a_.data()), n_,
                     ipiv_.data(), one_norm, &rc);
  if (info != 0) throw std::runtime_error("zsycon failed");
  return rc;
}

BandedFactor BandedFactor::compute(const BandedMatrix& m, double breakdown_tol) {
  BandedFactor f;
  f.n_ = m.n;
  f.b_ = m.bandwidth;
  const int n = m.n, b = m.bandwidth;
  const int ld = b + 1;
  f.unit_lower_.assign(m.a.begin(), m.a.end());
  f.d_.assign(n, 0.0);
  auto at = [&](int i, int j) -> double& { return f.unit_lower_[(i - j) + j * ld]; };
  for (int j = 0; j < n; ++j) {
    double dj = at(j, j);
    const int k_lo = std::max(0, j - b);
    for (int k = k_lo; k < j; ++k) {
      const double ljk = at(j, k);
      dj -= ljk * ljk * f.d_[k];
    }
    if (std::abs(dj) <= breakdown_tol) {
      f.breakdown_ = true;
      return f;
    }
    f.d_[j] = dj;
    if (dj < 0.0) {
      ++f.inertia_.negative;
    } else {
      ++f.inertia_.positive;
    }
    const int i_hi = std::min(n - 1, j + b);
    for (int i = j + 1; i <= i_hi; ++i) {
      double lij = at(i, j);
      const int kk_lo = std::max({0, i - b, j - b});
      for (int k = kk_lo; k < j; ++k) {
        lij -= at(i, k) * at(j, k) * f.d_[k];
      }
      at(i, j) = lij / dj;
    }
  }
  return f;
}

void BandedFactor::solve(std::vector<double>& rhs) const {
  const int n = n_, b = b_;
  const int ld = b + 1;
  auto lower = [&](int i, int j) { return unit_lower_[(i - j) + j * ld]; };
  for (int j = 0; j < n; ++j) {
    const double xj = rhs[j];
    const int i_hi = std::min(n - 1, j + b);
    for (int i = j + 1; i <= i_hi; ++i) rhs[i] -= lower(i, j) * xj;
  }
  for (int j = 0; j < n; ++j) rhs[j] /= d_[j];
  for (int j = n - 1; j >= 0; --j) {
    double xj = rhs[j];
    const int i_hi = std::min(n - 1, j + b);
    for (int i = j + 1; i <= i_hi; ++i) xj -= lower(i, j) * rhs[i];
    rhs[j] = xj;
  }
}

double smallest_eigenvalue_by_magnitude_banded(const BandedFactor& factor, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::cos(1.7 * i + 0.3);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  double lambda = 0.0;
  std::vector<double> w;
  for (int iter = 0; iter < 6; ++iter) {
    w = v;
    factor.solve(w);
    double vw = 0.0, ww = 0.0;
    for (int i = 0; i < n; ++i) {
      vw += v[i] * w[i];
      ww += w[i] * w[i];
    }
    if (!(ww > 0.0) || !std::isfinite(ww)) return 0.0;
    lambda = vw / ww;
    const double wnorm = std::sqrt(ww);
    for (int i = 0; i < n; ++i) v[i] = w[i] / wnorm;
  }
  return lambda;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(n);
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed");
  return w;
}

EigenSystem symmetric_eigensystem(std::vector<double> a, int n) {
  EigenSystem es;
  es.values.resize(n);
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, es.values.data());
  if (info != 0) throw std::runtime_error("dsyev failed");
  es.vectors = std::move(a);
  return es;
}

double smallest_eigenvalue_by_magnitude(const SymmetricFactor& factor,
                                        std::vector<double>* eigvec) {
  const int n = factor.order();
  std::vector<double> v(n);
  // Fixed deterministic start vector with nonzero overlap almost surely.
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.37 * std::cos(1.7 * i + 0.3);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;

  double lambda = 0.0;
  std::vector<double> w;
  for (int iter = 0; iter < 8; ++iter) {
    w = v;
    factor.solve(w);
    double vw = 0.0, ww = 0.0;
    for (int i = 0; i < n; ++i) {
      vw += v[i] * w[i];
      ww += w[i] * w[i];
    }
    if (!(ww > 0.0) || !std::isfinite(ww)) {
      return 0.0;  // numerically singular
    }
    lambda = vw / ww;  // eigenvalue of K nearest zero, signed
    const double wnorm = std::sqrt(ww);
    for (int i = 0; i < n; ++i) v[i] = w[i] / wnorm;
  }
  if (eigvec) *eigvec = v;
  return lambda;
}

double one_norm_symmetric(const std::vector<double>& a, int n) {
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      // symmetric storage: take the lower-triangle mirror
      const double v = i >= j ? a[i + j * n] : a[j + i * n];
      s += std::abs(v);
    }
    best = std::max(best, s);
  }
  return best;
}

double one_norm_symmetric(const std::vector<std::complex<double>>& a, int n) {
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::complex<double> v = i >= j ? a[i + j * n] : a[j + i * n];
      s += std::abs(v);
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace deltalab
