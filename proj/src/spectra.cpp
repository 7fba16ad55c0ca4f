#include "deltalab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace deltalab {

Orientation counting_orientation(int dimension) {
  return dimension == 2 ? Orientation::Increasing : Orientation::Decreasing;
}

CountingFunction::CountingFunction(const DomainSpec& domain, const CouplingField& omega,
                                   SolveOptions opts)
    : domain_(domain),
      omega_(omega),
      opts_(opts),
      orientation_(counting_orientation(domain.dimension)) {
  if (omega.values.size() != domain.lattice.size()) {
    throw std::invalid_argument("coupling field does not match the lattice");
  }
}

int CountingFunction::classify(const Inertia& inertia) const {
  return orientation_ == Orientation::Increasing ? inertia.positive : inertia.negative;
}

// Monotonicity surveillance over everything this instance has seen.
void CountingFunction::record_and_check(double probe, int count) const {
  auto pos = std::lower_bound(history_.begin(), history_.end(),
                              std::make_pair(probe, 0));
  if (pos != history_.begin() && std::prev(pos)->second > count) {
    throw OrientationViolation("counting function decreased between E=" +
                               std::to_string(std::prev(pos)->first) + " and E=" +
                               std::to_string(probe));
  }
  if (pos != history_.end() && pos->second < count) {
    throw OrientationViolation("counting function decreased between E=" +
                               std::to_string(probe) + " and E=" +
                               std::to_string(pos->first));
  }
  history_.insert(pos, {probe, count});
}

std::pair<int, double> CountingFunction::evaluate(double energy, bool want_branch) const {
  if (!(energy < 0.0)) throw std::domain_error("count_below: energy must be < 0");
  double probe = energy;
  for (int attempt = 0;; ++attempt) {
    // Large d=1 problems go through the banded slicing factorization; a
    // pivot breakdown falls back to the dense pivoted path below.
    if (domain_.dimension == 1 && domain_.sites() >= 96) {
      const BandedMatrix bm = assemble_banded_1d(domain_, omega_, probe, opts_.image_tol);
      if (bm.bandwidth < bm.n / 2) {
        const BandedFactor bf = BandedFactor::compute(bm, 1e-13 * bm.one_norm);
        if (!bf.breakdown()) {
          const double branch =
              want_branch ? smallest_eigenvalue_by_magnitude_banded(bf, bm.n) : 0.0;
          const int count = classify(bf.inertia());
          record_and_check(probe, count);
          return {count, branch};
        }
      }
    }
    auto body = assemble_real(domain_, omega_, probe, opts_.image_tol);
    const double scale = one_norm_symmetric(body, static_cast<int>(domain_.sites()));
    auto factor = SymmetricFactor::compute(std::move(body), static_cast<int>(domain_.sites()));
    const Inertia inertia = factor.inertia(1e-14 * scale);
    if (inertia.zero == 0 && !factor.singular()) {
      const double branch = !want_branch || domain_.sites() == 0
                                ? 0.0
                                : smallest_eigenvalue_by_magnitude(factor);
      const int count = classify(inertia);
      record_and_check(probe, count);
      return {count, branch};
    }
    // K(E) numerically singular: E sits on an eigenvalue. Probe just below.
    if (attempt >= 3) {
      throw SingularMatrixError("count_below: K singular even after jitter", 0.0);
    }
    jittered_ = true;
    probe -= 10.0 * opts_.root_tol * (attempt + 1);
  }
}

std::pair<int, double> CountingFunction::count_and_branch(double energy) const {
  return evaluate(energy, /*want_branch=*/true);
}

int CountingFunction::operator()(double energy) const {
  return evaluate(energy, /*want_branch=*/false).first;
}

void CountingFunction::verify_deep_probe() const {
  if ((*this)(opts_.deep_probe) != 0) {
    throw OrientationViolation("counting function does not vanish at the deep probe");
  }
}

int count_below(const DomainSpec& domain, const CouplingField& omega, double energy,
                const SolveOptions& opts) {
  if (domain.lattice.empty()) return 0;
  return CountingFunction(domain, omega, opts)(energy);
}

int Spectrum::total_multiplicity() const {
  int s = 0;
  for (const auto& r : eigenvalues) s += r.multiplicity;
  return s;
}

std::vector<double> Spectrum::expanded() const {
  std::vector<double> out;
  out.reserve(total_multiplicity());
  for (const auto& r : eigenvalues) {
    for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.energy);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Bracket {
  double lo, hi;
  int count_lo, count_hi;
};

EigenvalueRecord polish_root(const CountingFunction& counter, Bracket b,
                             const SolveOptions& opts) {
  // Safeguarded secant on the near-zero eigenvalue branch of K(E). Every
  // iterate also refreshes the count bracket, so a wild secant step can
  // never lose the root. The first two iterates are bisection steps that
  // seed the secant.
  double e_prev = 0.0, f_prev = 0.0, e_last = 0.0, f_last = 0.0;
  int have = 0;
  double best_e = 0.5 * (b.lo + b.hi);
  double best_f = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_polish_iters && b.hi - b.lo > opts.root_tol;
       ++iter) {
    double candidate = 0.5 * (b.lo + b.hi);
    if (have >= 2 && f_last != f_prev) {
      const double secant = e_last - f_last * (e_last - e_prev) / (f_last - f_prev);
      const double margin = 0.01 * (b.hi - b.lo);
      if (secant > b.lo + margin && secant < b.hi - margin) candidate = secant;
    }
    const auto [count, branch] = counter.count_and_branch(candidate);
    if (count == b.count_lo) {
      b.lo = candidate;
    } else {
      b.hi = candidate;
    }
    const double step_taken = std::abs(candidate - e_last);
    e_prev = e_last;
    f_prev = f_last;
    e_last = candidate;
    f_last = branch;
    ++have;
    if (std::abs(branch) < best_f) {
      best_f = std::abs(branch);
      best_e = candidate;
    }
    // The secant iterates converge long before the bracket closes.
    if (have > 2 && step_taken <= opts.root_tol) break;
  }
  EigenvalueRecord rec;
  const bool best_in_bracket = best_f < std::numeric_limits<double>::infinity() &&
                               best_e > b.lo - opts.root_tol &&
                               best_e < b.hi + opts.root_tol;
  if (best_in_bracket) {
    rec.energy = best_e;
    rec.residual = best_f;
  } else {
    rec.energy = 0.5 * (b.lo + b.hi);
    rec.residual = have > 0 ? std::abs(f_last) : 0.0;
  }
  rec.multiplicity = b.count_hi - b.count_lo;
  rec.cluster = false;
  return rec;
}

}  // namespace

Spectrum solve_spectrum(const DomainSpec& domain, const CouplingField& omega,
                        double window_lo, double window_hi, const SolveOptions& opts) {
  if (!(window_hi < 0.0) || !(window_lo < window_hi)) {
    throw std::domain_error("solve_spectrum: window must satisfy lo < hi < 0");
  }
  Spectrum spectrum;
  spectrum.window_lo = window_lo;
  spectrum.window_hi = window_hi;
  if (domain.lattice.empty()) return spectrum;

  CountingFunction counter(domain, omega, opts);
  spectrum.count_lo = counter(window_lo);
  spectrum.count_hi = counter(window_hi);
  if (spectrum.count_hi == spectrum.count_lo) return spectrum;

  std::deque<Bracket> queue{{window_lo, window_hi, spectrum.count_lo, spectrum.count_hi}};
  while (!queue.empty()) {
    Bracket b = queue.front();
    queue.pop_front();
    const int roots = b.count_hi - b.count_lo;
    if (roots <= 0) continue;
    if (roots == 1) {
      spectrum.eigenvalues.push_back(polish_root(counter, b, opts));
      continue;
    }
    if (b.hi - b.lo <= opts.root_tol) {
      // Unresolvable cluster: keep it, multiplicity flagged, never merged
      // into a neighbour silently.
      EigenvalueRecord rec;
      rec.energy = 0.5 * (b.lo + b.hi);
      rec.multiplicity = roots;
      rec.cluster = true;
      rec.residual = std::abs(counter.count_and_branch(rec.energy).second);
      spectrum.eigenvalues.push_back(rec);
      continue;
    }
    const double mid = 0.5 * (b.lo + b.hi);
    const int cmid = counter(mid);
    queue.push_back({b.lo, mid, b.count_lo, cmid});
    queue.push_back({mid, b.hi, cmid, b.count_hi});
  }
  std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
            [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
              return a.energy < b.energy;
            });
  return spectrum;
}

BranchReport branch_monotonicity_check(const DomainSpec& domain,
                                       const CouplingField& omega,
                                       const std::vector<double>& energy_grid,
                                       const SolveOptions& opts) {
  BranchReport report;
  report.grid_points = static_cast<int>(energy_grid.size());
  report.branches = static_cast<int>(domain.sites());
  if (energy_grid.size() < 2 || domain.lattice.empty()) return report;
  const double direction =
      counting_orientation(domain.dimension) == Orientation::Decreasing ? -1.0 : 1.0;
  std::vector<double> prev;
  for (std::size_t g = 0; g < energy_grid.size(); ++g) {
    if (g > 0 && !(energy_grid[g] > energy_grid[g - 1])) {
      throw std::domain_error("branch_monotonicity_check: grid must ascend");
    }
    auto body = assemble_real(domain, omega, energy_grid[g], opts.image_tol);
    auto eigs = symmetric_eigenvalues(std::move(body), static_cast<int>(domain.sites()));
    if (g > 0) {
      for (std::size_t k = 0; k < eigs.size(); ++k) {
        // Sorted order is the nearest-neighbour continuation for symmetric
        // spectra; a violation is movement against the orientation.
        const double step = (eigs[k] - prev[k]) * direction;
        report.max_violation = std::max(report.max_violation, -step);
      }
    }
    prev = std::move(eigs);
  }
  return report;
}

}  // namespace deltalab
