#include "deltalab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deltalab {

const char* bc_name(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Periodic: return "periodic";
    default: return "free";
  }
}

BoundaryCondition bc_from_name(const std::string& name) {
  if (name == "dirichlet") return BoundaryCondition::Dirichlet;
  if (name == "neumann") return BoundaryCondition::Neumann;
  if (name == "periodic") return BoundaryCondition::Periodic;
  if (name == "free" || name == "freespace") return BoundaryCondition::FreeSpace;
  throw std::domain_error("unknown boundary condition: " + name);
}

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

DomainSpec DomainSpec::cube(int dimension, double side, BoundaryCondition bc) {
  DomainSpec spec;
  spec.dimension = dimension;
  spec.side = side;
  spec.bc = bc;
  const int per_axis = static_cast<int>(std::floor(side - 1.0 + 1e-9)) + 1;
  if (per_axis < 1) throw std::domain_error("DomainSpec::cube: side too small for a site");
  std::vector<int> idx(dimension, 0);
  const int total = [&] {
    int t = 1;
    for (int i = 0; i < dimension; ++i) t *= per_axis;
    return t;
  }();
  spec.lattice.reserve(total);
  for (int flat = 0; flat < total; ++flat) {
    Point p;
    int rest = flat;
    for (int i = 0; i < dimension; ++i) {
      p.c[i] = 0.5 + rest % per_axis;
      rest /= per_axis;
    }
    spec.lattice.push_back(p);
  }
  spec.validate();
  return spec;
}

DomainSpec DomainSpec::cube_with_lattice(int dimension, double side, BoundaryCondition bc,
                                         std::vector<Point> lattice) {
  DomainSpec spec;
  spec.dimension = dimension;
  spec.side = side;
  spec.bc = bc;
  spec.lattice = std::move(lattice);
  spec.validate();
  return spec;
}

double DomainSpec::volume() const {
  double v = 1.0;
  for (int i = 0; i < dimension; ++i) v *= side;
  return v;
}

void DomainSpec::validate() const {
  if (dimension < 1 || dimension > 3) throw std::domain_error("dimension must be 1, 2 or 3");
  if (!(side > 0.0)) throw std::domain_error("side must be positive");
  const bool boxed = bc != BoundaryCondition::FreeSpace;
  for (std::size_t j = 0; j < lattice.size(); ++j) {
    if (boxed) {
      for (int i = 0; i < dimension; ++i) {
        const double x = lattice[j].c[i];
        if (x < 0.5 - 1e-12 || x > side - 0.5 + 1e-12) {
          throw std::domain_error("lattice point too close to the boundary (margin 1/2)");
        }
      }
    }
    for (std::size_t k = j + 1; k < lattice.size(); ++k) {
      if (distance(lattice[j], lattice[k], dimension) < 1e-9) {
        throw std::domain_error("lattice points must be pairwise distinct");
      }
    }
  }
}

namespace {

struct AxisTerm {
  double delta;
  double parity;
  bool identity;
};

constexpr int kMaxCellsPerAxis = 20000;

// Per-axis image offsets with |delta| <= r_cut. Reflection terms carry
// parity -1 under Dirichlet conditions.
void collect_axis_terms(BoundaryCondition bc, double side, double xi, double yi,
                        double r_cut, std::vector<AxisTerm>& out) {
  out.clear();
  if (bc == BoundaryCondition::FreeSpace) {
    out.push_back({xi - yi, 1.0, true});
    return;
  }
  if (bc == BoundaryCondition::Periodic) {
    const double base = xi - yi;
    const int m_lo = static_cast<int>(std::floor((base - r_cut) / side));
    const int m_hi = static_cast<int>(std::ceil((base + r_cut) / side));
    for (int m = m_lo; m <= m_hi; ++m) {
      const double d = base - m * side;
      if (std::abs(d) <= r_cut) out.push_back({d, 1.0, m == 0});
    }
    return;
  }
  const double refl_parity = bc == BoundaryCondition::Dirichlet ? -1.0 : 1.0;
  const double period = 2.0 * side;
  {
    const double base = xi - yi;
    const int m_lo = static_cast<int>(std::floor((base - r_cut) / period));
    const int m_hi = static_cast<int>(std::ceil((base + r_cut) / period));
    for (int m = m_lo; m <= m_hi; ++m) {
      const double d = base - m * period;
      if (std::abs(d) <= r_cut) out.push_back({d, 1.0, m == 0});
    }
  }
  {
    const double base = xi + yi;
    const int m_lo = static_cast<int>(std::floor((base - r_cut) / period));
    const int m_hi = static_cast<int>(std::ceil((base + r_cut) / period));
    for (int m = m_lo; m <= m_hi; ++m) {
      const double d = base - m * period;
      if (std::abs(d) <= r_cut) out.push_back({d, refl_parity, false});
    }
  }
}

double cutoff_radius(int dim, double kappa_value, double tol) {
  // g_d(r_cut) must fall below tol. Only the d=1 kernel carries the
  // 1/(2 kappa) prefactor; +4 covers the image multiplicity.
  const double prefactor = dim == 1 ? std::max(1.0, 1.0 / (2.0 * kappa_value)) : 1.0;
  return (std::log(prefactor / tol) + 4.0) / kappa_value;
}

void check_convergence(double r_cut, double side, double tol) {
  if (r_cut / side > static_cast<double>(kMaxCellsPerAxis)) {
    const double required = std::log(1.0 / tol) / kMaxCellsPerAxis;
    throw ConvergenceError(
        "image sum will not reach tol " + std::to_string(tol) +
            " within the cell cap; require kappa*side >= " + std::to_string(required),
        required);
  }
}

// Product of axis term lists; kernel is evaluated at the image distance.
// The identity image (m = 0 translation on every axis) can be dropped,
// which is how the corrector stays finite on the diagonal.
template <typename T, typename Kernel>
T product_sum(int dim, const std::vector<AxisTerm> lists[3], double r_cut,
              bool drop_identity, Kernel&& kernel) {
  const double r_cut2 = r_cut * r_cut;
  T total{};
  for (const AxisTerm& a : lists[0]) {
    const double ra = a.delta * a.delta;
    if (ra > r_cut2) continue;
    if (dim == 1) {
      if (drop_identity && a.identity) continue;
      total += a.parity * kernel(std::abs(a.delta));
      continue;
    }
    for (const AxisTerm& b : lists[1]) {
      const double rb = ra + b.delta * b.delta;
      if (rb > r_cut2) continue;
      if (dim == 2) {
        if (drop_identity && a.identity && b.identity) continue;
        total += a.parity * b.parity * kernel(std::sqrt(rb));
        continue;
      }
      for (const AxisTerm& c : lists[2]) {
        const double rc = rb + c.delta * c.delta;
        if (rc > r_cut2) continue;
        if (drop_identity && a.identity && b.identity && c.identity) continue;
        total += a.parity * b.parity * c.parity * kernel(std::sqrt(rc));
      }
    }
  }
  return total;
}

void check_box_membership(const DomainSpec& spec, const Point& p) {
  if (spec.bc == BoundaryCondition::FreeSpace) return;
  for (int i = 0; i < spec.dimension; ++i) {
    if (p.c[i] < -1e-12 || p.c[i] > spec.side + 1e-12) {
      throw std::domain_error("point outside the box");
    }
  }
}

template <typename T, typename Kernel>
T image_sum_impl(const DomainSpec& spec, const Point& x, const Point& y,
                 double kappa_real, double tol, bool drop_identity, Kernel&& kernel) {
  check_box_membership(spec, x);
  check_box_membership(spec, y);
  const double r_cut = cutoff_radius(spec.dimension, kappa_real, tol);
  if (spec.bc != BoundaryCondition::FreeSpace) {
    check_convergence(r_cut, spec.side, tol);
  }
  std::vector<AxisTerm> lists[3];
  for (int i = 0; i < spec.dimension; ++i) {
    collect_axis_terms(spec.bc, spec.side, x.c[i], y.c[i], r_cut, lists[i]);
  }
  return product_sum<T>(spec.dimension, lists, r_cut, drop_identity,
                        std::forward<Kernel>(kernel));
}

}  // namespace

ImageSummer::ImageSummer(const DomainSpec& spec, double kappa_value, double tol)
    : dim_(spec.dimension),
      side_(spec.side),
      bc_(spec.bc),
      kappa_(kappa_value),
      tol_(tol),
      r_cut_(cutoff_radius(spec.dimension, kappa_value, tol)) {
  if (bc_ != BoundaryCondition::FreeSpace) {
    check_convergence(r_cut_, side_, tol_);
  }
  const double period = bc_ == BoundaryCondition::Periodic ? side_ : 2.0 * side_;
  m_lo_ = static_cast<int>(std::floor(-r_cut_ / period)) - 1;
  m_hi_ = static_cast<int>(std::ceil(r_cut_ / period)) + 1;
  // Geometric tail estimate: first discarded shell times the shell ratio.
  const double q = std::exp(-kappa_ * period);
  const double shells = std::pow(2.0 * (m_hi_ - m_lo_ + 2.0), dim_ - 1) * 2.0 * dim_ * 2.0;
  tail_bound_ = shells * std::max(1.0, 1.0 / (2.0 * kappa_)) *
                std::exp(-kappa_ * r_cut_) / (1.0 - q);
}

double ImageSummer::sum_images(const Point& x, const Point& y, bool drop_identity) const {
  std::vector<AxisTerm> lists[3];
  for (int i = 0; i < dim_; ++i) {
    collect_axis_terms(bc_, side_, x.c[i], y.c[i], r_cut_, lists[i]);
  }
  const int dim = dim_;
  const double kappa_value = kappa_;
  return product_sum<double>(dim_, lists, r_cut_, drop_identity, [dim, kappa_value](double r) {
    return free_green_real(dim, r, kappa_value);
  });
}

double ImageSummer::green(const Point& x, const Point& y) const {
  return sum_images(x, y, /*drop_identity=*/false);
}

double ImageSummer::corrector(const Point& x, const Point& y) const {
  return -sum_images(x, y, /*drop_identity=*/true);
}

Complex domain_green(const DomainSpec& spec, const Point& x, const Point& y,
                     const SpectralParam& sp, double tol) {
  if (sp.is_real()) return {domain_green_real(spec, x, y, sp.kappa.real(), tol), 0.0};
  const int dim = spec.dimension;
  return image_sum_impl<Complex>(spec, x, y, sp.kappa.real(), tol, false,
                                 [&](double r) { return free_green(dim, r, sp); });
}

Complex corrector(const DomainSpec& spec, const Point& x, const Point& y,
                  const SpectralParam& sp, double tol) {
  if (sp.is_real()) return {corrector_real(spec, x, y, sp.kappa.real(), tol), 0.0};
  const int dim = spec.dimension;
  return -image_sum_impl<Complex>(spec, x, y, sp.kappa.real(), tol, true,
                                  [&](double r) { return free_green(dim, r, sp); });
}

double domain_green_real(const DomainSpec& spec, const Point& x, const Point& y,
                         double kappa_value, double tol) {
  const int dim = spec.dimension;
  return image_sum_impl<double>(spec, x, y, kappa_value, tol, false, [&](double r) {
    return free_green_real(dim, r, kappa_value);
  });
}

double corrector_real(const DomainSpec& spec, const Point& x, const Point& y,
                      double kappa_value, double tol) {
  const int dim = spec.dimension;
  return -image_sum_impl<double>(spec, x, y, kappa_value, tol, true, [&](double r) {
    return free_green_real(dim, r, kappa_value);
  });
}

}  // namespace deltalab
