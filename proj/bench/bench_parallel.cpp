// Compares the serial reference ensemble loop against the OpenMP path on
// a representative workload (Wegner-style interval counts, d=1), and the
// serial vs parallel K-matrix assembly on one large d=3 box.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "deltalab/ensemble.hpp"
#include "deltalab/kmatrix.hpp"
#include "deltalab/spectra.hpp"

using namespace deltalab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double ensemble_workload(int workers, std::int64_t realizations) {
  const DomainSpec domain = DomainSpec::cube(1, 50, BoundaryCondition::Dirichlet);
  DistributionSpec dist;
  const auto t0 = std::chrono::steady_clock::now();
  auto counts = run_ensemble<int>(realizations, workers, [&](std::int64_t r) {
    const CouplingField omega = sample_couplings(dist, domain.sites(), 7, r);
    CountingFunction counter(domain, omega);
    return counter(-0.9) - counter(-1.1);
  });
  long total = 0;
  for (int c : counts) total += c;
  const double dt = seconds_since(t0);
  std::printf("  workers=%d  realizations=%lld  total_count=%ld  %.3f s\n", workers,
              static_cast<long long>(realizations), total, dt);
  return dt;
}

double assembly_workload(bool parallel) {
  const DomainSpec domain = DomainSpec::cube(3, 10, BoundaryCondition::Dirichlet);
  DistributionSpec dist;
  const CouplingField omega = sample_couplings(dist, domain.sites(), 11, 0);
  const int saved = omp_get_max_threads();
  if (!parallel) omp_set_num_threads(1);
  const auto t0 = std::chrono::steady_clock::now();
  auto body = assemble_real(domain, omega, -40.0, 1e-12);
  const double dt = seconds_since(t0);
  omp_set_num_threads(saved);
  std::printf("  %s assembly: n=%zu  %.3f s  (K[0,0]=%.6g)\n",
              parallel ? "parallel" : "serial  ", domain.sites(), dt, body[0]);
  return dt;
}

}  // namespace

int main() {
  std::printf("ensemble map (d=1 interval counts):\n");
  const double serial = ensemble_workload(1, 1500);
  const double parallel = ensemble_workload(omp_get_max_threads(), 1500);
  std::printf("  speedup: %.2fx on %d threads\n", serial / parallel,
              omp_get_max_threads());

  std::printf("K assembly (d=3, 1000 sites):\n");
  const double sa = assembly_workload(false);
  const double pa = assembly_workload(true);
  std::printf("  speedup: %.2fx\n", sa / pa);
  return 0;
}
