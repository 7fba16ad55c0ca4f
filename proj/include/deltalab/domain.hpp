#pragma once

#include <stdexcept>
#include <vector>

#include "deltalab/greens.hpp"

namespace deltalab {

enum class BoundaryCondition { Dirichlet, Neumann, Periodic, FreeSpace };

const char* bc_name(BoundaryCondition bc);
BoundaryCondition bc_from_name(const std::string& name);

struct Point {
  double c[3] = {0.0, 0.0, 0.0};
};

double distance(const Point& a, const Point& b, int dim);

/// Box [0, side]^dim with interaction sites strictly inside. The default
/// lattice places one site per unit cell at half-integer coordinates, so
/// every site sits at distance >= 1/2 from the walls and blocks of integer
/// side length inherit the same margin.
struct DomainSpec {
  int dimension = 1;
  double side = 1.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::vector<Point> lattice;

  static DomainSpec cube(int dimension, double side, BoundaryCondition bc);
  static DomainSpec cube_with_lattice(int dimension, double side, BoundaryCondition bc,
                                      std::vector<Point> lattice);

  double volume() const;
  std::size_t sites() const { return lattice.size(); }
  void validate() const;  // interior, pairwise distinct, margin >= 1/2
};

/// Image-sum truncation failed to reach the requested tolerance; carries
/// the kappa*L needed for the request.
struct ConvergenceError : std::runtime_error {
  double required_kappa_side;
  ConvergenceError(const std::string& what, double req)
      : std::runtime_error(what), required_kappa_side(req) {}
};

/// Evaluates G^X(x, y; z) and the corrector c_{z,y}(x) = G0 - G^X on one
/// box for a fixed spectral parameter. Enumerates reflection/translation
/// images per axis out to a cutoff radius set by the tolerance; the
/// recorded tail_bound dominates the discarded remainder.
class ImageSummer {
 public:
  ImageSummer(const DomainSpec& spec, double kappa_value, double tol);

  double green(const Point& x, const Point& y) const;
  double corrector(const Point& x, const Point& y) const;
  double tail_bound() const { return tail_bound_; }
  double truncation_radius() const { return r_cut_; }

 private:
  double sum_images(const Point& x, const Point& y, bool drop_identity) const;

  int dim_;
  double side_;
  BoundaryCondition bc_;
  double kappa_;
  double tol_;
  double r_cut_;
  int m_lo_, m_hi_;  // image cell range per axis
  double tail_bound_;
};

Complex domain_green(const DomainSpec& spec, const Point& x, const Point& y,
                     const SpectralParam& sp, double tol);
Complex corrector(const DomainSpec& spec, const Point& x, const Point& y,
                  const SpectralParam& sp, double tol);

double domain_green_real(const DomainSpec& spec, const Point& x, const Point& y,
                         double kappa_value, double tol);
double corrector_real(const DomainSpec& spec, const Point& x, const Point& y,
                      double kappa_value, double tol);

}  // namespace deltalab
