#include "deltalab/kmatrix.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deltalab {

double effective_coupling(int dimension, double omega_value) {
  return dimension == 1 ? -omega_value : omega_value;
}

double CharacteristicMatrix::one_norm() const {
  if (real_valued()) return one_norm_symmetric(real_entries, n);
  return one_norm_symmetric(entries, n);
}

namespace {

void check_field(const DomainSpec& domain, const CouplingField& omega) {
  if (omega.values.size() != domain.lattice.size()) {
    throw std::invalid_argument("coupling field does not match the lattice");
  }
}

}  // namespace

std::vector<double> assemble_real(const DomainSpec& domain, const CouplingField& omega,
                                  double energy, double tol) {
  check_field(domain, omega);
  if (!(energy < 0.0)) throw std::domain_error("assemble_real: energy must be < 0");
  const int n = static_cast<int>(domain.lattice.size());
  const int dim = domain.dimension;
  const double kap = std::sqrt(-energy);
  const double shift = diagonal_shift_real(dim, kap);
  const bool boxed = domain.bc != BoundaryCondition::FreeSpace;
  std::vector<double> body(static_cast<std::size_t>(n) * n, 0.0);

  const ImageSummer summer(domain, kap, tol);
  const auto& sites = domain.lattice;

#pragma omp parallel for schedule(dynamic, 8) if (n >= 128 && !omp_in_parallel())
  for (int j = 0; j < n; ++j) {
    const double diag_corr = boxed ? summer.corrector(sites[j], sites[j]) : 0.0;
    body[j + static_cast<std::size_t>(j) * n] =
        1.0 / effective_coupling(dim, omega.values[j]) + diag_corr - shift;
    for (int i = j + 1; i < n; ++i) {
      const double g = boxed ? summer.green(sites[i], sites[j])
                             : free_green_real(dim, distance(sites[i], sites[j], dim), kap);
      body[i + static_cast<std::size_t>(j) * n] = -g;
      body[j + static_cast<std::size_t>(i) * n] = -g;
    }
  }
  return body;
}

BandedMatrix assemble_banded_1d(const DomainSpec& domain, const CouplingField& omega,
                                double energy, double tol) {
  check_field(domain, omega);
  if (domain.dimension != 1) {
    throw std::invalid_argument("assemble_banded_1d: one-dimensional lattices only");
  }
  if (!(energy < 0.0)) throw std::domain_error("assemble_banded_1d: energy must be < 0");
  const int n = static_cast<int>(domain.lattice.size());
  const double kap = std::sqrt(-energy);
  const double shift = diagonal_shift_real(1, kap);
  const bool boxed = domain.bc != BoundaryCondition::FreeSpace;
  const ImageSummer summer(domain, kap, tol);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return domain.lattice[a].c[0] < domain.lattice[b].c[0];
  });

  // Bandwidth: the largest index distance within the truncation radius.
  const double r_cut = summer.truncation_radius();
  int bandwidth = 0;
  for (int i = 0, j = 0; i < n; ++i) {
    while (j < n && domain.lattice[order[j]].c[0] - domain.lattice[order[i]].c[0] <= r_cut) {
      ++j;
    }
    bandwidth = std::max(bandwidth, j - 1 - i);
  }
  bandwidth = std::min(bandwidth, n - 1);

  BandedMatrix m;
  m.n = n;
  m.bandwidth = bandwidth;
  m.a.assign(static_cast<std::size_t>(bandwidth + 1) * n, 0.0);
  const int ld = bandwidth + 1;
  for (int j = 0; j < n; ++j) {
    const Point& xj = domain.lattice[order[j]];
    const double diag_corr = boxed ? summer.corrector(xj, xj) : 0.0;
    m.a[0 + j * ld] =
        1.0 / effective_coupling(1, omega.values[order[j]]) + diag_corr - shift;
    const int i_hi = std::min(n - 1, j + bandwidth);
    for (int i = j + 1; i <= i_hi; ++i) {
      const Point& xi = domain.lattice[order[i]];
      const double g = boxed ? summer.green(xi, xj)
                             : free_green_real(1, std::abs(xi.c[0] - xj.c[0]), kap);
      m.a[(i - j) + j * ld] = -g;
    }
  }
  // One-norm over the full symmetric pattern.
  std::vector<double> colsum(n, 0.0);
  for (int j = 0; j < n; ++j) {
    colsum[j] += std::abs(m.a[0 + j * ld]);
    const int i_hi = std::min(n - 1, j + bandwidth);
    for (int i = j + 1; i <= i_hi; ++i) {
      const double v = std::abs(m.a[(i - j) + j * ld]);
      colsum[j] += v;
      colsum[i] += v;
    }
  }
  for (double s : colsum) m.one_norm = std::max(m.one_norm, s);
  return m;
}

CharacteristicMatrix assemble(const DomainSpec& domain, const CouplingField& omega,
                              Complex z, double tol, bool with_split) {
  check_field(domain, omega);
  const SpectralParam sp = kappa(z);
  const int n = static_cast<int>(domain.lattice.size());
  const int dim = domain.dimension;
  const bool boxed = domain.bc != BoundaryCondition::FreeSpace;

  CharacteristicMatrix K;
  K.n = n;
  K.dimension = dim;
  K.sp = sp;
  K.variant = boxed ? KVariant::BoxBC : KVariant::TruncatedWholeSpace;
  K.entries.assign(static_cast<std::size_t>(n) * n, Complex(0.0, 0.0));

  const Complex shift = diagonal_shift(dim, sp);
  const auto& sites = domain.lattice;

  KSplit split;
  if (with_split) {
    split.t.assign(static_cast<std::size_t>(n) * n, Complex(0.0, 0.0));
    split.v.resize(n);
    split.shift = shift;
  }

  for (int j = 0; j < n; ++j) {
    const Complex diag_corr =
        boxed ? corrector(domain, sites[j], sites[j], sp, tol) : Complex(0.0, 0.0);
    const Complex v_j = 1.0 / effective_coupling(dim, omega.values[j]);
    K.entries[j + static_cast<std::size_t>(j) * n] = v_j + diag_corr - shift;
    if (with_split) {
      split.t[j + static_cast<std::size_t>(j) * n] = diag_corr;
      split.v[j] = v_j;
    }
    for (int i = j + 1; i < n; ++i) {
      const Complex g =
          boxed ? domain_green(domain, sites[i], sites[j], sp, tol)
                : free_green(dim, distance(sites[i], sites[j], dim), sp);
      K.entries[i + static_cast<std::size_t>(j) * n] = -g;
      K.entries[j + static_cast<std::size_t>(i) * n] = -g;
      if (with_split) {
        split.t[i + static_cast<std::size_t>(j) * n] = -g;
        split.t[j + static_cast<std::size_t>(i) * n] = -g;
      }
    }
  }
  if (sp.is_real()) {
    K.real_entries.resize(K.entries.size());
    for (std::size_t i = 0; i < K.entries.size(); ++i) {
      K.real_entries[i] = K.entries[i].real();
    }
  }
  if (with_split) K.split = std::move(split);
  return K;
}

namespace {

template <class Factor>
void check_condition(const Factor& factor, double one_norm, double cond_cap) {
  const double rc = factor.singular() ? 0.0 : factor.rcond(one_norm);
  if (rc < cond_cap) {
    throw SingularMatrixError(
        "K is numerically singular (z is an eigenvalue; use the spectrum solver)",
        rc * one_norm);
  }
}

}  // namespace

Complex k_inverse_entry(const CharacteristicMatrix& K, int i, int j, double cond_cap) {
  if (i < 0 || j < 0 || i >= K.n || j >= K.n) {
    throw std::out_of_range("k_inverse_entry: index out of range");
  }
  if (K.real_valued()) {
    auto factor = SymmetricFactor::compute(K.real_entries, K.n);
    check_condition(factor, K.one_norm(), cond_cap);
    std::vector<double> rhs(K.n, 0.0);
    rhs[j] = 1.0;
    factor.solve(rhs);
    return {rhs[i], 0.0};
  }
  auto factor = ComplexSymmetricFactor::compute(K.entries, K.n);
  check_condition(factor, K.one_norm(), cond_cap);
  std::vector<Complex> rhs(K.n, Complex(0.0, 0.0));
  rhs[j] = 1.0;
  factor.solve(rhs);
  return rhs[i];
}

std::vector<double> k_inverse_real(const std::vector<double>& body, int n,
                                   double cond_cap) {
  auto factor = SymmetricFactor::compute(body, n);
  check_condition(factor, one_norm_symmetric(body, n), cond_cap);
  std::vector<double> inv(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) inv[j + static_cast<std::size_t>(j) * n] = 1.0;
  factor.solve_many(inv, n);
  return inv;
}

Complex resolvent_kernel(const DomainSpec& domain, const CouplingField& omega,
                         const Point& x, const Point& y, Complex z, double tol,
                         double cond_cap) {
  check_field(domain, omega);
  const SpectralParam sp = kappa(z);
  const int n = static_cast<int>(domain.lattice.size());
  const int dim = domain.dimension;
  for (const Point& p : domain.lattice) {
    if (distance(p, x, dim) < 1e-12 || distance(p, y, dim) < 1e-12) {
      throw std::domain_error("resolvent_kernel: x, y must avoid the lattice points");
    }
  }
  auto g_of = [&](const Point& u, const Point& v) {
    return domain.bc == BoundaryCondition::FreeSpace
               ? free_green(dim, distance(u, v, dim), sp)
               : domain_green(domain, u, v, sp, tol);
  };
  const Complex direct = g_of(x, y);
  if (n == 0) return direct;

  CharacteristicMatrix K = assemble(domain, omega, z, tol);
  std::vector<Complex> gy(n);
  for (int k = 0; k < n; ++k) gy[k] = g_of(domain.lattice[k], y);
  if (K.real_valued()) {
    auto factor = SymmetricFactor::compute(K.real_entries, K.n);
    check_condition(factor, K.one_norm(), cond_cap);
    std::vector<double> rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = gy[k].real();
    factor.solve(rhs);
    Complex acc = direct;
    for (int k = 0; k < n; ++k) acc += g_of(x, domain.lattice[k]) * rhs[k];
    return acc;
  }
  auto factor = ComplexSymmetricFactor::compute(K.entries, K.n);
  check_condition(factor, K.one_norm(), cond_cap);
  std::vector<Complex> rhs = gy;
  factor.solve(rhs);
  Complex acc = direct;
  for (int k = 0; k < n; ++k) acc += g_of(x, domain.lattice[k]) * rhs[k];
  return acc;
}

}  // namespace deltalab
