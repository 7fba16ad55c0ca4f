#pragma once

#include <optional>
#include <vector>

#include "deltalab/disorder.hpp"
#include "deltalab/domain.hpp"
#include "deltalab/linalg.hpp"

namespace deltalab {

enum class KVariant { TruncatedWholeSpace, BoxBC };

/// K = t(z) + diag(v) - shift * I, kept when a split is requested.
/// t carries the geometry (corrector diagonal, -G off-diagonal), v the
/// inverse effective couplings 1/alpha_d.
struct KSplit {
  std::vector<Complex> t;  // n*n, column-major
  std::vector<Complex> v;  // diagonal
  Complex shift;
};

/// The characteristic matrix K(z, omega): complex symmetric, real
/// symmetric on the real axis. Entries are column-major.
struct CharacteristicMatrix {
  int n = 0;
  int dimension = 1;
  SpectralParam sp;
  KVariant variant = KVariant::BoxBC;
  std::vector<Complex> entries;
  std::vector<double> real_entries;  // filled iff sp is real
  std::optional<KSplit> split;

  bool real_valued() const { return !real_entries.empty(); }
  double one_norm() const;
};

/// Assembles K(z, omega). FreeSpace domains produce the truncated
/// whole-space variant (plain -G0 off-diagonal, no corrector); boxes add
/// the diagonal corrector and use the boundary-condition Green's function.
/// Diagonal scalar parts, fixed by the single-center calibration:
///   d=1: -1/omega - 1/(2 kappa),  d=2: 1/omega - log(kappa)/(2 pi),
///   d=3: 1/omega + kappa/(4 pi),  each + c_{z,x_j}(x_j) on a box.
CharacteristicMatrix assemble(const DomainSpec& domain, const CouplingField& omega,
                              Complex z, double tol, bool with_split = false);

/// Fast path: real E < 0, returns just the column-major matrix body.
std::vector<double> assemble_real(const DomainSpec& domain, const CouplingField& omega,
                                  double energy, double tol);

/// d=1 banded assembly in sorted-site order. The K entries decay like the
/// kernel, so everything beyond the truncation radius is below tol; counts
/// and the near-zero branch are permutation invariant, so the site order
/// does not matter to the callers.
BandedMatrix assemble_banded_1d(const DomainSpec& domain, const CouplingField& omega,
                                double energy, double tol);

/// [K^-1]_ij through the symmetric factorization. Throws
/// SingularMatrixError when the condition estimate is below cond_cap.
Complex k_inverse_entry(const CharacteristicMatrix& K, int i, int j,
                        double cond_cap = 1e-12);

/// Full inverse (n rhs solve); used by the fractional-moment estimator.
std::vector<double> k_inverse_real(const std::vector<double>& body, int n,
                                   double cond_cap = 1e-12);

/// Krein formula: G_omega(x,y;z) = G^X(x,y) + sum_jk G^X(x,x_j)[K^-1]_jk G^X(x_k,y).
Complex resolvent_kernel(const DomainSpec& domain, const CouplingField& omega,
                         const Point& x, const Point& y, Complex z, double tol,
                         double cond_cap = 1e-12);

double effective_coupling(int dimension, double omega_value);

}  // namespace deltalab
