#include "ringform/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ringform::search {

Vec3 sequence_point(std::size_t k) {
  // Plastic number g solves g^3 = g + 1.
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  const double kk = static_cast<double>(k + 1);
  double s = 0.5 + a1 * kk;
  double t = 0.5 + a2 * kk;
  s -= std::floor(s);
  t -= std::floor(t);
  const double z = 1.0 - 2.0 * s;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double lon = 2.0 * std::numbers::pi * t;
  return {r * std::cos(lon), r * std::sin(lon), z};
}

MinimizeResult nelder_mead(const Objective& f, std::vector<double> x0,
                           std::span<const double> steps, double tol,
                           std::size_t max_evaluations) {
  const std::size_t dim = x0.size();
  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t d = 0; d < dim; ++d) simplex[d + 1][d] += steps[d];

  MinimizeResult res;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };

  std::vector<double> values(dim + 1);
  for (std::size_t v = 0; v <= dim; ++v) values[v] = eval(simplex[v]);
  std::vector<std::size_t> order(dim + 1);

  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  const auto along = [&](double coeff, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t d = 0; d < dim; ++d) out[d] = centroid[d] + coeff * (worst[d] - centroid[d]);
  };

  while (res.evaluations < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double size = 0.0;
    for (std::size_t v = 0; v <= dim; ++v) {
      for (std::size_t d = 0; d < dim; ++d) {
        size = std::max(size, std::abs(simplex[v][d] - simplex[best][d]));
      }
    }
    if (size < tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v][d] / dim;
    }

    along(-1.0, trial, simplex[worst]);
    const double f_reflect = eval(trial);
    if (f_reflect < values[best]) {
      along(-2.0, trial2, simplex[worst]);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    along(outside ? -0.5 : 0.5, trial2, simplex[worst]);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[v][d] = simplex[best][d] + 0.5 * (simplex[v][d] - simplex[best][d]);
      }
      values[v] = eval(simplex[v]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  res.value = *it;
  res.x = simplex[static_cast<std::size_t>(it - values.begin())];
  return res;
}

MinimizeResult nelder_mead_restarted(const Objective& f, std::vector<double> x0,
                                     std::span<const double> steps, double tol,
                                     std::size_t max_restarts) {
  MinimizeResult best = nelder_mead(f, std::move(x0), steps, tol);
  for (std::size_t r = 0; r < max_restarts; ++r) {
    MinimizeResult next = nelder_mead(f, best.x, steps, tol);
    next.evaluations += best.evaluations;
    const bool improved = next.value < best.value - 1e-15;
    if (next.value <= best.value) best = std::move(next);
    if (!improved) break;
  }
  return best;
}

}  // namespace ringform::search
