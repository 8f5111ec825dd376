#include "ringform/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "ringform/errors.hpp"
#include "ringform/linearization.hpp"
#include "ringform/search.hpp"

namespace ringform {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kFirstCheckpoint = 64;

double cyclic_step(std::size_t n) { return kPi - kPi / static_cast<double>(n); }

void require_parity(const SystemState& state, bool even, const char* what) {
  if (state.size() < 2) throw DomainError(std::string(what) + ": need at least 2 agents");
  if ((state.size() % 2 == 0) != even) {
    throw DomainError(std::string(what) + (even ? " needs an even" : " needs an odd") +
                      " number of agents");
  }
}

// Orthonormal pair spanning the plane orthogonal to unit u.
std::pair<Vec3, Vec3> plane_basis(const Vec3& u) {
  const Vec3 a = degenerate_axis(u);
  return {a, u.cross(a)};
}

// Sample counts at which the best candidate so far is handed to the local
// refinement: 64, 128, ... up to bit_ceil(resolution).
std::size_t effective_resolution(std::size_t resolution) {
  return std::bit_ceil(std::max(resolution, kFirstCheckpoint));
}

bool is_checkpoint(std::size_t count) {
  return count >= kFirstCheckpoint && std::has_single_bit(count);
}

}  // namespace

double min_edge_distance(const SystemState& state) {
  const std::size_t n = state.size();
  double w = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    w = std::min(w, geodesic_distance(state[i], state[(i + 1) % n]));
  }
  return w;
}

double edge_potential(const SystemState& state, std::size_t i) {
  const std::size_t n = state.size();
  if (i >= n) throw std::out_of_range("edge index out of range");
  return 0.5 * (state[i].vec() + state[(i + 1) % n].vec()).squaredNorm();
}

double lyapunov_v(const SystemState& state) {
  double v = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) v = std::max(v, edge_potential(state, i));
  return v;
}

double edge_potential_rate(const SystemState& state, const RingGraph& g, std::size_t i,
                           ControlLaw law) {
  const auto xdot = rhs_cartesian(state, g, law);
  const std::size_t j = g.next(i);
  return state[j].vec().dot(xdot[i]) + state[i].vec().dot(xdot[j]);
}

double dini_derivative(const SystemState& state, const RingGraph& g, double active_tol,
                       ControlLaw law) {
  const auto xdot = rhs_cartesian(state, g, law);
  const double v = lyapunov_v(state);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (v - edge_potential(state, i) > active_tol) continue;
    const std::size_t j = g.next(i);
    best = std::max(best, state[j].vec().dot(xdot[i]) + state[i].vec().dot(xdot[j]));
  }
  return best;
}

double potential_sum(const SystemState& state) {
  double sum = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) sum += edge_potential(state, i);
  return sum;
}

double potential_sum_rate(const SystemState& state, const RingGraph& g) {
  if (g.directed()) throw DomainError("potential sum rate is defined for undirected rings");
  const auto omega = control_omega(state, g, ControlLaw::Repulsive);
  double rate = 0.0;
  for (const auto& w : omega) rate -= w.squaredNorm();
  return rate;
}

SystemState antipodal_formation(std::size_t n, const Vec3& v) {
  if (n < 2 || n % 2 != 0) throw DomainError("antipodal formation needs an even n");
  const ReducedAttitude p(v);
  std::vector<ReducedAttitude> agents;
  for (std::size_t i = 0; i < n; ++i) agents.push_back(i % 2 == 0 ? p : -p);
  return SystemState(std::move(agents));
}

SystemState cyclic_formation(std::size_t n, const Vec3& u, const Vec3& v) {
  if (n < 3 || n % 2 == 0) throw DomainError("cyclic formation needs an odd n >= 3");
  const Vec3 axis = u.normalized();
  const double beta = cyclic_step(n);
  std::vector<ReducedAttitude> agents;
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back(rotate(ReducedAttitude(v), axis, static_cast<double>(i) * beta));
  }
  return SystemState(std::move(agents));
}

double antipodal_distance_upper(const SystemState& state) {
  require_parity(state, true, "antipodal distance");
  const std::size_t n = state.size();
  // Agent n/2 (1-based) is index n/2 - 1; candidate_i = (-1)^(i + n/2) Gamma_{n/2}.
  const std::size_t anchor = n / 2 - 1;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t agent = i + 1;
    const bool flip = (agent + n / 2) % 2 == 1;
    const Vec3 candidate = flip ? Vec3(-state[anchor].vec()) : state[anchor].vec();
    d = std::max(d, geodesic_distance(state[i].vec(), candidate));
  }
  return d;
}

CyclicUpper cyclic_distance_upper(const SystemState& state) {
  require_parity(state, false, "cyclic distance");
  const std::size_t n = state.size();
  const AxisAngle k12 = relative_axis_angle(state[0], state[1]);
  const double beta = cyclic_step(n);
  CyclicUpper out;
  out.degenerate_axis = k12.degenerate;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 candidate = rotate(state[0].vec(), k12.axis, static_cast<double>(i) * beta);
    out.distance = std::max(out.distance, geodesic_distance(state[i].vec(), candidate));
  }
  return out;
}

double antipodal_distance(const SystemState& state, const SearchOptions& opts) {
  require_parity(state, true, "antipodal distance");
  const std::size_t n = state.size();
  std::vector<Vec3> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (i % 2 == 0 ? 1.0 : -1.0) * state[i].vec();

  const auto objective = [&](const Vec3& v) {
    double d = 0.0;
    for (const auto& q : p) d = std::max(d, geodesic_distance(q, v));
    return d;
  };

  // Global pass: track the best sample (largest min cosine) at each checkpoint.
  const std::size_t total = effective_resolution(opts.resolution);
  std::vector<std::pair<std::size_t, Vec3>> seeds;
  double best_cos = -2.0;
  Vec3 best = Vec3::UnitZ();
  for (std::size_t k = 0; k < total; ++k) {
    const Vec3 v = search::sequence_point(k);
    double c = 2.0;
    for (const auto& q : p) c = std::min(c, q.dot(v));
    if (c > best_cos) {
      best_cos = c;
      best = v;
    }
    if (is_checkpoint(k + 1) && (seeds.empty() || seeds.back().second != best)) {
      seeds.emplace_back(k + 1, best);
    }
  }

  double result = std::numeric_limits<double>::infinity();
  for (const auto& [count, seed] : seeds) {
    const auto [e1, e2] = plane_basis(seed);
    const auto chart = [&, e1 = e1, e2 = e2](std::span<const double> x) {
      return objective((seed + x[0] * e1 + x[1] * e2).normalized());
    };
    const double spacing = std::sqrt(4.0 * kPi / static_cast<double>(count));
    const double steps[2] = {spacing, spacing};
    const auto r = search::nelder_mead_restarted(chart, {0.0, 0.0}, steps, opts.refine_tol);
    result = std::min({result, r.value, objective(seed)});
  }
  return result;
}

double cyclic_distance(const SystemState& state, const SearchOptions& opts) {
  require_parity(state, false, "cyclic distance");
  const std::size_t n = state.size();
  const double beta = cyclic_step(n);
  std::vector<Vec3> x(n);
  std::vector<double> cos_step(n), sin_step(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = state[i].vec();
    cos_step[i] = std::cos(static_cast<double>(i) * beta);
    sin_step[i] = std::sin(static_cast<double>(i) * beta);
  }

  const std::size_t m = std::max<std::size_t>(opts.angle_resolution, 8);
  std::vector<double> cg(m), sg(m), worst(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double gamma = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
    cg[k] = std::cos(gamma);
    sg[k] = std::sin(gamma);
  }

  // For u with plane basis (a, b) and v = cos(g) a + sin(g) b, the target of
  // agent i is cos(g + i beta) a + sin(g + i beta) b, so its cosine with
  // Gamma_i is cos(g) P_i + sin(g) Q_i.
  struct Candidate {
    Vec3 u;
    Vec3 v;
  };
  std::vector<std::pair<std::size_t, Candidate>> seeds;
  double best_cos = -2.0;
  Candidate best{Vec3::UnitZ(), Vec3::UnitX()};
  bool improved_since_seed = true;

  const std::size_t total = effective_resolution(opts.resolution);
  for (std::size_t s = 0; s < total; ++s) {
    const Vec3 u = search::sequence_point(s);
    const auto [a, b] = plane_basis(u);
    std::fill(worst.begin(), worst.end(), 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double xa = x[i].dot(a);
      const double xb = x[i].dot(b);
      const double pi_ = xa * cos_step[i] + xb * sin_step[i];
      const double qi = -xa * sin_step[i] + xb * cos_step[i];
      for (std::size_t k = 0; k < m; ++k) {
        const double c = cg[k] * pi_ + sg[k] * qi;
        worst[k] = c < worst[k] ? c : worst[k];
      }
    }
    const auto it = std::max_element(worst.begin(), worst.end());
    if (*it > best_cos) {
      best_cos = *it;
      const auto k = static_cast<std::size_t>(it - worst.begin());
      best = {u, cg[k] * a + sg[k] * b};
      improved_since_seed = true;
    }
    if (is_checkpoint(s + 1) && improved_since_seed) {
      seeds.emplace_back(s + 1, best);
      improved_since_seed = false;
    }
  }

  const auto objective = [&](const Vec3& u, const Vec3& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d = std::max(d, geodesic_distance(x[i], rotate(v, u, static_cast<double>(i) * beta)));
    }
    return d;
  };

  double result = std::numeric_limits<double>::infinity();
  for (const auto& [count, seed] : seeds) {
    const auto [e1, e2] = plane_basis(seed.u);
    const auto chart = [&, e1 = e1, e2 = e2](std::span<const double> p) {
      const Vec3 u = (seed.u + p[0] * e1 + p[1] * e2).normalized();
      const Vec3 v0 = (seed.v - seed.v.dot(u) * u).normalized();
      return objective(u, rotate(v0, u, p[2]));
    };
    const double spacing = std::sqrt(4.0 * kPi / static_cast<double>(count));
    const double steps[3] = {spacing, spacing, 2.0 * kPi / static_cast<double>(m)};
    const auto r = search::nelder_mead_restarted(chart, {0.0, 0.0, 0.0}, steps, opts.refine_tol);
    result = std::min({result, r.value, objective(seed.u, seed.v)});
  }
  return result;
}

std::string to_string(FormationKind k) {
  switch (k) {
    case FormationKind::Antipodal: return "Antipodal";
    case FormationKind::CyclicStatic: return "CyclicStatic";
    case FormationKind::CyclicRotating: return "CyclicRotating";
    case FormationKind::Consensus: return "Consensus";
    case FormationKind::GreatCircleEquilibrium: return "GreatCircleEquilibrium";
    case FormationKind::Other: return "Other";
  }
  return "Other";
}

double max_pairwise_distance(const SystemState& state) {
  double d = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      d = std::max(d, geodesic_distance(state[i], state[j]));
    }
  }
  return d;
}

Vec3 fit_great_circle_axis(const SystemState& state) {
  Matrix scatter = Matrix::Zero(3, 3);
  for (const auto& a : state) scatter += a.vec() * a.vec().transpose();
  const auto eig = symmetric_eigen(scatter);
  return Vec3(eig.vectors.col(0)).normalized();
}

FormationClass classify_formation(const SystemState& state, const RingGraph& g,
                                  std::span<const double> omega_norms, double tol,
                                  const SearchOptions& opts) {
  const std::size_t n = state.size();
  if (omega_norms.size() != n) throw DomainError("need one angular-velocity norm per agent");
  const double max_rate =
      n == 0 ? 0.0 : *std::max_element(omega_norms.begin(), omega_norms.end());

  if (n % 2 == 0) {
    const double d = antipodal_distance(state, opts);
    if (d < tol) return {FormationKind::Antipodal, d};
  } else if (n >= 3) {
    const double d = cyclic_distance(state, opts);
    if (d < tol) {
      if (max_rate < tol) return {FormationKind::CyclicStatic, d};
      const double rate = std::sin(kPi / static_cast<double>(n));
      const bool rotating = std::all_of(omega_norms.begin(), omega_norms.end(),
                                        [&](double w) { return std::abs(w - rate) < tol; });
      if (rotating && g.directed()) return {FormationKind::CyclicRotating, d};
    }
  }

  const double spread = max_pairwise_distance(state);
  if (spread < tol) return {FormationKind::Consensus, spread};

  if (max_rate < tol) {
    const Vec3 u = fit_great_circle_axis(state);
    const auto [a, b] = plane_basis(u);
    const ReducedAttitude ra(a), rb(b);
    double off = 0.0;
    bool on_circle = true;
    for (const auto& p : state) {
      on_circle = on_circle && great_circle_test(ra, rb, p, tol);
      off = std::max(off, std::asin(std::min(1.0, std::abs(u.dot(p.vec())))));
    }
    if (on_circle) return {FormationKind::GreatCircleEquilibrium, off};
  }
  return {FormationKind::Other, max_rate};
}

std::vector<BoundCheckReport> check_bounds(const SystemState& state, const SearchOptions& opts) {
  const std::size_t n = state.size();
  const auto nd = static_cast<double>(n);
  const double w = min_edge_distance(state);
  std::vector<BoundCheckReport> out;

  const auto lower = [](std::string name, double lhs, double rhs) {
    BoundCheckReport r{std::move(name), true, lhs, rhs, lhs - rhs, true, std::nullopt};
    r.holds = r.slack >= -kBoundSlackTol;
    return r;
  };
  const auto upper = [](std::string name, double lhs, double rhs) {
    BoundCheckReport r{std::move(name), true, lhs, rhs, rhs - lhs, true, std::nullopt};
    r.holds = r.slack >= -kBoundSlackTol;
    return r;
  };
  const auto not_applicable = [](std::string name) {
    BoundCheckReport r;
    r.name = std::move(name);
    r.applicable = false;
    return r;
  };

  if (n % 2 == 0) {
    const double d = antipodal_distance(state, opts);
    out.push_back(lower("w_lower_by_antipodal_distance", w, kPi - 2.0 * d));
    out.push_back(upper("antipodal_distance_by_w", d, nd / 2.0 * (kPi - w)));
    return out;
  }

  const double d = cyclic_distance(state, opts);
  const double deficit = std::max(0.0, cyclic_step(n) - w);
  out.push_back(lower("w_lower_by_cyclic_distance", w, cyclic_step(n) - 2.0 * d));

  const double root = std::sqrt(4.0 * nd * nd * nd * deficit);
  if (root <= 2.0 * std::numbers::sqrt2) {
    out.push_back(upper("cyclic_distance_by_w", d, root));
  } else {
    out.push_back(not_applicable("cyclic_distance_by_w"));
  }

  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    spread = std::max(spread, std::abs(cyclic_step(n) -
                                       geodesic_distance(state[i], state[(i + 1) % n])));
  }
  const double nu = std::sqrt(spread);
  if (nu <= std::numbers::sqrt2 / nd) {
    auto exact = upper("cyclic_distance_by_edge_spread", d, 2.0 * nd * nu);
    exact.nu = nu;
    out.push_back(exact);
    auto cand = upper("cyclic_candidate_by_edge_spread", cyclic_distance_upper(state).distance,
                      2.0 * nd * nu);
    cand.nu = nu;
    out.push_back(cand);
  } else {
    for (const char* name : {"cyclic_distance_by_edge_spread", "cyclic_candidate_by_edge_spread"}) {
      auto r = not_applicable(name);
      r.nu = nu;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace ringform
