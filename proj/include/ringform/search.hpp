#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ringform/sphere_geom.hpp"

namespace ringform::search {

/// k-th point of a nested low-discrepancy sequence on S^2: the plastic-number
/// (R2) Kronecker sequence pushed through the Lambert equal-area map. The first
/// N points of the sequence are the same for every N, so refining a search by
/// raising N only ever adds candidates.
Vec3 sequence_point(std::size_t k);

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimization. `steps` gives the initial simplex edge per
/// coordinate; iteration stops once every vertex is within `tol` of the best
/// vertex in every coordinate, or after `max_evaluations`.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           std::span<const double> steps, double tol,
                           std::size_t max_evaluations = 20000);

/// nelder_mead restarted from its own optimum with the original simplex size
/// until a restart fails to improve the value (at most `max_restarts` times).
MinimizeResult nelder_mead_restarted(const Objective& f, std::vector<double> x0,
                                     std::span<const double> steps, double tol,
                                     std::size_t max_restarts = 6);

}  // namespace ringform::search
