#include "deltalab/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "deltalab/bessel.hpp"

namespace deltalab {

ShootingProblem ShootingProblem::from_domain(const DomainSpec& domain,
                                             const CouplingField& omega) {
  if (domain.dimension != 1) {
    throw std::invalid_argument("shooting oracle is one-dimensional");
  }
  if (omega.values.size() != domain.lattice.size()) {
    throw std::invalid_argument("coupling field does not match the lattice");
  }
  ShootingProblem problem;
  problem.length = domain.side;
  for (std::size_t j = 0; j < domain.lattice.size(); ++j) {
    problem.deltas.emplace_back(domain.lattice[j].c[0], omega.values[j]);
  }
  std::sort(problem.deltas.begin(), problem.deltas.end());
  problem.validate();
  return problem;
}

void ShootingProblem::validate() const {
  if (!(length > 0.0)) throw std::domain_error("shooting: length must be positive");
  double prev = 0.0;
  for (const auto& [x, w] : deltas) {
    (void)w;
    if (!(x > 0.0) || !(x < length)) {
      throw std::domain_error("shooting: delta positions must be interior");
    }
    if (!(x > prev)) throw std::domain_error("shooting: positions must ascend strictly");
    prev = x;
  }
}

namespace {

struct ShotResult {
  int zeros = 0;        // interior zeros of u, i.e. eigenvalues below E
  double mismatch = 0;  // u(L), rescaled; sign flips exactly at eigenvalues
};

// Propagates (u, u') across the free segments, applying the delta jumps.
// The pair is renormalized per segment, which keeps signs and zero
// positions intact while avoiding overflow at large kappa L.
ShotResult shoot(const ShootingProblem& problem, double energy) {
  const double kap = std::sqrt(-energy);
  double u = 0.0, du = 1.0;
  double pos = 0.0;
  int zeros = 0;
  auto advance = [&](double to) {
    const double s = to - pos;
    if (s <= 0.0) return;
    const double ch = std::cosh(kap * s), sh = std::sinh(kap * s);
    const double a = u, b = du / kap;
    // u(s') = a cosh(kappa s') + b sinh(kappa s'): at most one zero.
    if (b != 0.0 && std::abs(a / b) < 1.0) {
      const double s_zero = std::atanh(-a / b) / kap;
      if (s_zero > 1e-300 && s_zero < s) ++zeros;
    }
    u = a * ch + b * sh;
    du = kap * (a * sh + b * ch);
    const double scale = std::max(std::abs(u), std::abs(du) / kap);
    if (scale > 1e100) {
      u /= scale;
      du /= scale;
    }
    pos = to;
  };
  for (const auto& [x, w] : problem.deltas) {
    advance(x);
    if (u == 0.0) ++zeros;  // node exactly on a delta
    du += w * u;
  }
  advance(problem.length);
  return {zeros, u};
}

}  // namespace

Spectrum shoot_spectrum(const ShootingProblem& problem, double window_lo,
                        double window_hi, double rel_tol) {
  problem.validate();
  if (!(window_hi < 0.0) || !(window_lo < window_hi)) {
    throw std::domain_error("shoot_spectrum: window must satisfy lo < hi < 0");
  }
  Spectrum spectrum;
  spectrum.window_lo = window_lo;
  spectrum.window_hi = window_hi;
  spectrum.count_lo = shoot(problem, window_lo).zeros;
  spectrum.count_hi = shoot(problem, window_hi).zeros;

  std::vector<std::array<double, 2>> brackets;
  std::vector<std::array<int, 2>> counts;
  brackets.push_back({window_lo, window_hi});
  counts.push_back({spectrum.count_lo, spectrum.count_hi});
  while (!brackets.empty()) {
    const auto [lo, hi] = brackets.back();
    const auto [clo, chi] = counts.back();
    brackets.pop_back();
    counts.pop_back();
    if (chi - clo == 0) continue;
    if (chi - clo == 1) {
      // Bisect on the sign of the boundary mismatch.
      double a = lo, b = hi;
      double fa = shoot(problem, a).mismatch;
      while (b - a > rel_tol * std::max(1.0, std::abs(a))) {
        const double mid = 0.5 * (a + b);
        const double fm = shoot(problem, mid).mismatch;
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      EigenvalueRecord rec;
      rec.energy = 0.5 * (a + b);
      rec.multiplicity = 1;  // 1-D Dirichlet eigenvalues are simple
      rec.residual = std::abs(shoot(problem, rec.energy).mismatch);
      spectrum.eigenvalues.push_back(rec);
      continue;
    }
    const double mid = 0.5 * (lo + hi);
    const int cmid = shoot(problem, mid).zeros;
    brackets.push_back({lo, mid});
    counts.push_back({clo, cmid});
    brackets.push_back({mid, hi});
    counts.push_back({cmid, chi});
  }
  std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
            [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
              return a.energy < b.energy;
            });
  return spectrum;
}

namespace {

// Sturm count for the tridiagonal finite-difference matrix: number of
// eigenvalues below E equals the number of negative pivots.
int fd_count_below(const std::vector<double>& diag, double off, double energy) {
  int count = 0;
  double d = 1.0;
  const double off2 = off * off;
  for (double a : diag) {
    d = a - energy - (d == 0.0 ? off2 / 1e-300 : off2 / d);
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> fd_eigenvalues(const std::vector<double>& diag, double off,
                                   double lo, double hi) {
  std::vector<double> roots;
  const int clo = fd_count_below(diag, off, lo);
  const int chi = fd_count_below(diag, off, hi);
  for (int k = clo; k < chi; ++k) {
    double a = lo, b = hi;
    // Isolate the (k+1)-th eigenvalue, then bisect to tolerance.
    while (b - a > 1e-13 * std::max(1.0, std::abs(a))) {
      const double mid = 0.5 * (a + b);
      if (fd_count_below(diag, off, mid) <= k) {
        a = mid;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

std::vector<double> fd_solve(const ShootingProblem& problem, double h, double lo,
                             double hi) {
  const long m = std::lround(problem.length / h);
  if (std::abs(m * h - problem.length) > 1e-9) {
    throw std::invalid_argument("grid_oracle_1d: h must divide the interval length");
  }
  std::vector<double> diag(m - 1, 2.0 / (h * h));
  for (const auto& [x, w] : problem.deltas) {
    const long i = std::lround(x / h);
    if (std::abs(i * h - x) > 1e-9 || i <= 0 || i >= m) {
      throw std::invalid_argument("grid_oracle_1d: delta position off the grid");
    }
    diag[i - 1] += w / h;
  }
  return fd_eigenvalues(diag, -1.0 / (h * h), lo, hi);
}

}  // namespace

GridOracleResult grid_oracle_1d(const ShootingProblem& problem, double h,
                                double window_lo, double window_hi) {
  problem.validate();
  const auto coarse = fd_solve(problem, h, window_lo, window_hi);
  const auto fine = fd_solve(problem, h / 2.0, window_lo, window_hi);
  if (coarse.size() != fine.size()) {
    throw std::runtime_error("grid_oracle_1d: eigenvalue count changed under refinement");
  }
  GridOracleResult result;
  result.spectrum.window_lo = window_lo;
  result.spectrum.window_hi = window_hi;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    EigenvalueRecord rec;
    rec.energy = (4.0 * fine[k] - coarse[k]) / 3.0;  // second-order Richardson
    rec.multiplicity = 1;
    rec.residual = std::abs(fine[k] - coarse[k]) / 3.0;
    result.spectrum.eigenvalues.push_back(rec);
    result.error_bars.push_back(std::abs(fine[k] - coarse[k]) / 3.0);
  }
  result.spectrum.count_lo = 0;
  result.spectrum.count_hi = static_cast<int>(coarse.size());
  return result;
}

namespace {

// Root of a strictly monotone function on (0, kappa_hi]; empty if there is
// no sign change.
template <typename F>
std::vector<double> monotone_root(F&& f, double kappa_lo, double kappa_hi) {
  double flo = f(kappa_lo);
  double fhi = f(kappa_hi);
  if ((flo < 0.0) == (fhi < 0.0)) return {};
  double a = kappa_lo, b = kappa_hi;
  for (int iter = 0; iter < 200 && b - a > 1e-15 * std::max(1.0, b); ++iter) {
    const double mid = 0.5 * (a + b);
    if ((f(mid) < 0.0) == (flo < 0.0)) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return {0.5 * (a + b)};
}

}  // namespace

std::vector<double> closed_form_centers(int dimension, double omega_value, int centers,
                                        double separation) {
  if (!(omega_value < 0.0)) {
    throw std::domain_error("closed_form_centers: omega must be negative");
  }
  if (centers != 1 && centers != 2) {
    throw std::invalid_argument("closed_form_centers: one or two centers");
  }
  constexpr double kFourPi = 4.0 * std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (centers == 1) {
    switch (dimension) {
      case 1: return {-omega_value * omega_value / 4.0};
      case 2: return {-std::exp(kFourPi / omega_value)};
      default: return {-(kFourPi / omega_value) * (kFourPi / omega_value)};
    }
  }
  if (!(separation > 0.0)) {
    throw std::domain_error("closed_form_centers: two centers need separation > 0");
  }
  const double r = separation;
  std::vector<double> kappas;
  auto take = [&](std::vector<double> roots) {
    for (double k : roots) kappas.push_back(k);
  };
  switch (dimension) {
    case 1: {
      const double w = -omega_value;
      // kappa = (|omega|/2)(1 +- exp(-kappa r)); the minus branch only has a
      // positive root when |omega| r / 2 > 1.
      take(monotone_root([&](double k) { return k - 0.5 * w * (1.0 + std::exp(-k * r)); },
                         1e-12, w + 1.0));
      if (0.5 * w * r > 1.0) {
        take(monotone_root(
            [&](double k) { return k - 0.5 * w * (1.0 - std::exp(-k * r)); },
            1e-12 / r, w + 1.0));
      }
      break;
    }
    case 2: {
      // sigma = +-g with sigma = 1/omega - log(kappa)/(2 pi), g = K0(kappa r)/(2 pi).
      const double c = kTwoPi / omega_value;
      take(monotone_root(
          [&](double k) { return std::log(k) - bessel_k0(k * r) - c; }, 1e-14, 1e6));
      // log k + K0(k r) is increasing with finite limit log(2/r) - gamma at 0+.
      take(monotone_root(
          [&](double k) { return std::log(k) + bessel_k0(k * r) - c; }, 1e-14, 1e6));
      break;
    }
    default: {
      const double c = kFourPi / omega_value;  // negative
      take(monotone_root(
          [&](double k) { return k + c - std::exp(-k * r) / r; }, 0.0, -c + 2.0 / r));
      if (-c > 1.0 / r) {
        take(monotone_root(
            [&](double k) { return k + c + std::exp(-k * r) / r; }, 0.0, -c + 2.0 / r));
      }
      break;
    }
  }
  std::vector<double> energies;
  for (double k : kappas) energies.push_back(-k * k);
  std::sort(energies.begin(), energies.end());
  return energies;
}

RankOnePair make_rank_one_pair(int n, std::vector<double> a, std::vector<double> phi,
                               double lo, double hi) {
  if (static_cast<int>(phi.size()) != n ||
      static_cast<int>(a.size()) != n * n) {
    throw std::invalid_argument("make_rank_one_pair: size mismatch");
  }
  double norm = 0.0;
  for (double x : phi) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("make_rank_one_pair: phi = 0");
  for (double& x : phi) x /= norm;

  // Jitter the endpoints off both spectra.
  std::vector<double> ab = a;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) ab[i + j * n] += phi[i] * phi[j];
  }
  const auto ev_a = symmetric_eigenvalues(a, n);
  const auto ev_ab = symmetric_eigenvalues(ab, n);
  auto clear_of_spectra = [&](double x) {
    for (double e : ev_a) {
      if (std::abs(e - x) < 1e-7) return false;
    }
    for (double e : ev_ab) {
      if (std::abs(e - x) < 1e-7) return false;
    }
    return true;
  };
  double step = 3e-7;
  while (!clear_of_spectra(lo)) lo -= step;
  while (!clear_of_spectra(hi)) hi += step;

  RankOnePair pair;
  pair.n = n;
  pair.a = std::move(a);
  pair.phi = std::move(phi);
  pair.lo = lo;
  pair.hi = hi;
  return pair;
}

RankOneReport rank_one_verify(const RankOnePair& pair, int formula_grid) {
  const int n = pair.n;
  RankOneReport report;

  // Krylov rank pre-check: phi should be cyclic for A.
  {
    std::vector<std::vector<double>> basis;
    std::vector<double> v = pair.phi;
    int rank = 0;
    for (int k = 0; k < n; ++k) {
      for (const auto& q : basis) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += q[i] * v[i];
        for (int i = 0; i < n; ++i) v[i] -= proj * q[i];
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-10) break;
      for (double& x : v) x /= norm;
      basis.push_back(v);
      ++rank;
      // v <- A * q_k
      std::vector<double> next(n, 0.0);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) next[i] += pair.a[i + j * n] * basis.back()[j];
      }
      v = std::move(next);
    }
    report.cyclic = rank == n;
  }

  std::vector<double> ab = pair.a;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) ab[i + j * n] += pair.phi[i] * pair.phi[j];
  }
  const EigenSystem sys_a = symmetric_eigensystem(pair.a, n);
  const EigenSystem sys_ab = symmetric_eigensystem(ab, n);

  auto weights = [&](const EigenSystem& sys) {
    std::vector<double> w(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += sys.vectors[i + k * n] * pair.phi[i];
      w[k] = dot * dot;
    }
    return w;
  };
  const auto w_a = weights(sys_a);
  const auto w_ab = weights(sys_ab);

  auto count_in = [&](const std::vector<double>& ev) {
    int c = 0;
    for (double e : ev) {
      if (e >= pair.lo && e <= pair.hi) ++c;
    }
    return c;
  };
  report.count_a = count_in(sys_a.values);
  report.count_ab = count_in(sys_ab.values);
  report.counting_ok = std::abs(report.count_a - report.count_ab) <= 1 &&
                       (report.count_a < 1 || report.count_a - 1 <= report.count_ab);

  // Herglotz transfer: F_{A+B} = F_A / (1 + F_A) on a grid off both spectra.
  auto f_of = [&](const EigenSystem& sys, const std::vector<double>& w, double x) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += w[k] / (sys.values[k] - x);
    return s;
  };
  const double span = pair.hi - pair.lo;
  double max_err = 0.0;
  for (int g = 0; g < formula_grid; ++g) {
    const double x = pair.lo + span * (g + 0.5) / formula_grid;
    bool clear = true;
    for (double e : sys_a.values) {
      if (std::abs(e - x) < 0.02 * span) clear = false;
    }
    for (double e : sys_ab.values) {
      if (std::abs(e - x) < 0.02 * span) clear = false;
    }
    if (!clear) continue;
    const double fa = f_of(sys_a, w_a, x);
    const double fab = f_of(sys_ab, w_ab, x);
    if (std::abs(1.0 + fa) < 1e-8) continue;
    max_err = std::max(max_err, std::abs(fab - fa / (1.0 + fa)));
  }
  report.max_formula_error = max_err;

  // Pole interlacing inside [lo, hi], restricted to the phi-cyclic part.
  struct Pole {
    double x;
    int which;
  };
  std::vector<Pole> poles;
  for (int k = 0; k < n; ++k) {
    if (w_a[k] > 1e-12 && sys_a.values[k] >= pair.lo && sys_a.values[k] <= pair.hi) {
      poles.push_back({sys_a.values[k], 0});
    }
    if (w_ab[k] > 1e-12 && sys_ab.values[k] >= pair.lo && sys_ab.values[k] <= pair.hi) {
      poles.push_back({sys_ab.values[k], 1});
    }
  }
  std::sort(poles.begin(), poles.end(),
            [](const Pole& p, const Pole& q) { return p.x < q.x; });
  report.interlacing_ok = true;
  for (std::size_t i = 1; i < poles.size(); ++i) {
    if (poles[i].which == poles[i - 1].which) report.interlacing_ok = false;
  }
  return report;
}

}  // namespace deltalab
