#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace deltalab {

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
};

struct SingularMatrixError : std::runtime_error {
  double smallest_singular_value;
  SingularMatrixError(const std::string& what, double sv)
      : std::runtime_error(what), smallest_singular_value(sv) {}
};

/// Bunch-Kaufman LDL^T factorization of a dense real symmetric matrix
/// (column-major, lower triangle). Inertia is read off the block-diagonal
/// factor, which is what the eigenvalue counting function runs on.
class SymmetricFactor {
 public:
  static SymmetricFactor compute(std::vector<double> a, int n);

  Inertia inertia(double zero_tol = 0.0) const;
  void solve(std::vector<double>& rhs) const;             // single rhs, in place
  void solve_many(std::vector<double>& rhs, int nrhs) const;
  double rcond(double one_norm) const;
  bool singular() const { return info_ > 0; }
  int order() const { return n_; }

 private:
  int n_ = 0;
  int info_ = 0;
  std::vector<double> a_;
  std::vector<int> ipiv_;
};

/// zsytrf/zsytrs pair for complex symmetric (not Hermitian) matrices.
class ComplexSymmetricFactor {
 public:
  static ComplexSymmetricFactor compute(std::vector<std::complex<double>> a, int n);

  void solve(std::vector<std::complex<double>>& rhs) const;
  void solve_many(std::vector<std::complex<double>>& rhs, int nrhs) const;
  double rcond(double one_norm) const;
  bool singular() const { return info_ > 0; }
  int order() const { return n_; }

 private:
  int n_ = 0;
  int info_ = 0;
  std::vector<std::complex<double>> a_;
  std::vector<int> ipiv_;
};

/// Symmetric banded matrix in lower band storage: a[(i-j) + j*(b+1)]
/// holds A_ij for 0 <= i-j <= b.
struct BandedMatrix {
  int n = 0;
  int bandwidth = 0;
  std::vector<double> a;
  double one_norm = 0.0;
};

/// Unpivoted banded LDL^T, the spectrum-slicing workhorse for the large
/// d=1 runs. Breakdown (a vanishing pivot) is reported, not patched; the
/// caller falls back to the dense factorization or jitters the energy.
class BandedFactor {
 public:
  static BandedFactor compute(const BandedMatrix& m, double breakdown_tol);

  bool breakdown() const { return breakdown_; }
  const Inertia& inertia() const { return inertia_; }
  void solve(std::vector<double>& rhs) const;  // in place

 private:
  int n_ = 0;
  int b_ = 0;
  bool breakdown_ = false;
  Inertia inertia_;
  std::vector<double> unit_lower_;  // same band layout, unit diagonal implicit
  std::vector<double> d_;
};

double smallest_eigenvalue_by_magnitude_banded(const BandedFactor& factor, int n);

/// All eigenvalues of a dense symmetric matrix, ascending (dsyev).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix.
struct EigenSystem {
  std::vector<double> values;
  std::vector<double> vectors;  // column-major n*n
};
EigenSystem symmetric_eigensystem(std::vector<double> a, int n);

/// Signed eigenvalue of smallest magnitude, by power iteration on the
/// factorized inverse. Also reports the (unit) iterate on request.
double smallest_eigenvalue_by_magnitude(const SymmetricFactor& factor,
                                        std::vector<double>* eigvec = nullptr);

double one_norm_symmetric(const std::vector<double>& a, int n);
double one_norm_symmetric(const std::vector<std::complex<double>>& a, int n);

/// Serializes threaded BLAS when the caller is already running inside an
/// ensemble-level parallel region.
void set_blas_threads(int n);

}  // namespace deltalab
