#pragma once

#include <omp.h>

#include <cstdint>
#include <exception>
#include <vector>

#include "deltalab/linalg.hpp"

namespace deltalab {

/// Maps a per-realization job over [0, count). Results land at their
/// realization index, so reductions downstream are deterministic no matter
/// how the iterations were scheduled.
///
/// workers <= 1 runs the plain serial loop; this is the reference
/// implementation the parallel path is tested against. With more workers
/// the loop runs under OpenMP and threaded BLAS is serialized to keep the
/// cores for the realizations.
template <typename Result, typename Fn>
std::vector<Result> run_ensemble(std::int64_t count, int workers, Fn&& fn) {
  std::vector<Result> results(static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < count; ++r) {
      results[static_cast<std::size_t>(r)] = fn(r);
    }
    return results;
  }

  set_blas_threads(1);
  std::exception_ptr first_error = nullptr;
#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (std::int64_t r = 0; r < count; ++r) {
    if (first_error) continue;
    try {
      results[static_cast<std::size_t>(r)] = fn(r);
    } catch (...) {
#pragma omp critical(deltalab_ensemble_error)
      if (!first_error) first_error = std::current_exception();
    }
  }
  set_blas_threads(omp_get_max_threads());
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

inline int default_workers() { return omp_get_max_threads(); }

}  // namespace deltalab
