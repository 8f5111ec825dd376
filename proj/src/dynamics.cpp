#include "ringform/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>

#include "ringform/analysis.hpp"
#include "ringform/errors.hpp"

namespace ringform {

namespace {

constexpr double kPoleMargin = 1e-6;
constexpr double kMinRotationRate = 1e-14;
constexpr double kStaticOmegaTol = 1e-10;
constexpr double kRotatingTol = 1e-10;
constexpr std::size_t kRotatingLag = 1000;

double law_sign(ControlLaw law) { return law == ControlLaw::Repulsive ? -1.0 : 1.0; }

// Works on unnormalized vectors too (RK4 stages).
void omega_raw(std::span<const Vec3> x, const RingGraph& g, ControlLaw law,
               std::span<Vec3> omega) {
  const double sign = law_sign(law);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec3 sum = Vec3::Zero();
    for (std::size_t j : g.neighbors(i)) sum += x[i].cross(x[j]);
    omega[i] = sign * sum;
  }
}

void velocity_raw(std::span<const Vec3> x, const RingGraph& g, ControlLaw law,
                  std::span<Vec3> xdot) {
  omega_raw(x, g, law, xdot);
  for (std::size_t i = 0; i < x.size(); ++i) xdot[i] = xdot[i].cross(x[i]);
}

void check_consistent(const SystemState& state, const RingGraph& g) {
  if (state.size() != g.size()) {
    throw DomainError("state has " + std::to_string(state.size()) + " agents but ring has " +
                      std::to_string(g.size()));
  }
}

// Advances x in place; returns the largest | |x_i| - 1 | seen before the
// final renormalization.
double advance(std::vector<Vec3>& x, const RingGraph& g, ControlLaw law, double dt,
               Integrator integrator) {
  const std::size_t n = x.size();
  double drift = 0.0;
  if (integrator == Integrator::LieEuler) {
    std::vector<Vec3> omega(n);
    omega_raw(x, g, law, omega);
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = omega[i].norm();
      if (rate < kMinRotationRate) continue;
      x[i] = rotate(x[i], omega[i] / rate, rate * dt);
      drift = std::max(drift, std::abs(x[i].norm() - 1.0));
      x[i].normalize();
    }
    return drift;
  }

  std::vector<Vec3> k1(n), k2(n), k3(n), k4(n), tmp(n);
  velocity_raw(x, g, law, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  velocity_raw(tmp, g, law, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  velocity_raw(tmp, g, law, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
  velocity_raw(tmp, g, law, k4);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    drift = std::max(drift, std::abs(x[i].norm() - 1.0));
    x[i].normalize();
  }
  return drift;
}

Vec3 sample_unit(std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  for (;;) {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace

SystemState SystemState::from_vectors(std::span<const Vec3> vs) {
  std::vector<ReducedAttitude> agents;
  agents.reserve(vs.size());
  for (const Vec3& v : vs) agents.emplace_back(v);
  return SystemState(std::move(agents));
}

SystemState SystemState::from_angles(std::span<const SphereAngles> angles) {
  std::vector<ReducedAttitude> agents;
  agents.reserve(angles.size());
  for (const SphereAngles& a : angles) agents.push_back(angles_to_vec(a));
  return SystemState(std::move(agents));
}

std::vector<Vec3> SystemState::vectors() const {
  std::vector<Vec3> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(a.vec());
  return out;
}

std::vector<SphereAngles> SystemState::angles() const {
  std::vector<SphereAngles> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(vec_to_angles(a));
  return out;
}

SystemState SystemState::rotated(const Vec3& axis, double angle) const {
  std::vector<ReducedAttitude> out;
  out.reserve(agents_.size());
  for (const auto& a : agents_) out.push_back(rotate(a, axis, angle));
  return SystemState(std::move(out));
}

std::string to_string(ControlLaw law) {
  return law == ControlLaw::Repulsive ? "repulsive" : "consensus";
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::LieEuler ? "lie-euler" : "rk4";
}

std::string to_string(InitConstraint c) {
  switch (c) {
    case InitConstraint::None: return "none";
    case InitConstraint::InOmegaE: return "omega_e";
    case InitConstraint::InOmegaO: return "omega_o";
    case InitConstraint::Hemisphere: return "hemisphere";
  }
  return "unknown";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Horizon: return "horizon";
    case StopReason::StaticEquilibrium: return "static-equilibrium";
    case StopReason::RotatingSteadyState: return "rotating-steady-state";
  }
  return "unknown";
}

std::vector<Vec3> control_omega(const SystemState& state, const RingGraph& g, ControlLaw law) {
  check_consistent(state, g);
  const auto x = state.vectors();
  std::vector<Vec3> omega(x.size());
  omega_raw(x, g, law, omega);
  return omega;
}

std::vector<Vec3> rhs_cartesian(const SystemState& state, const RingGraph& g, ControlLaw law) {
  check_consistent(state, g);
  const auto x = state.vectors();
  std::vector<Vec3> xdot(x.size());
  velocity_raw(x, g, law, xdot);
  return xdot;
}

std::vector<AngleRates> rhs_angles(std::span<const SphereAngles> angles, const RingGraph& g,
                                   ControlLaw law) {
  if (angles.size() != g.size()) throw DomainError("angle list does not match ring size");
  for (const auto& a : angles) {
    if (std::abs(a.phi) >= std::numbers::pi / 2 - kPoleMargin) {
      throw DomainError("angle coordinates are singular at the poles (|phi| = pi/2)");
    }
  }
  // Repulsive form:
  //   cos(phi_i) psi_i' = -sum_j sin(psi_j - psi_i) cos(phi_j)
  //   phi_i'            =  sum_j [sin(phi_i) cos(phi_j) cos(psi_i - psi_j) - cos(phi_i) sin(phi_j)]
  const double sign = law == ControlLaw::Repulsive ? 1.0 : -1.0;
  std::vector<AngleRates> out(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const auto& ai = angles[i];
    double psi_sum = 0.0;
    double phi_sum = 0.0;
    for (std::size_t j : g.neighbors(i)) {
      const auto& aj = angles[j];
      psi_sum -= std::sin(aj.psi - ai.psi) * std::cos(aj.phi);
      phi_sum += std::sin(ai.phi) * std::cos(aj.phi) * std::cos(ai.psi - aj.psi) -
                 std::cos(ai.phi) * std::sin(aj.phi);
    }
    out[i].psi_dot = sign * psi_sum / std::cos(ai.phi);
    out[i].phi_dot = sign * phi_sum;
  }
  return out;
}

SystemState step(const SystemState& state, const RingGraph& g, ControlLaw law, double dt,
                 Integrator integrator) {
  check_consistent(state, g);
  if (!(dt > 0.0)) throw ConfigError("step size must be positive");
  auto x = state.vectors();
  advance(x, g, law, dt, integrator);
  return SystemState::from_vectors(x);
}

SystemState random_state(std::size_t n, std::uint64_t seed, InitConstraint constraint,
                         std::size_t max_attempts) {
  if (n < 2) throw ConfigError("need at least 2 agents");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec3> x(n);

  const auto fail = [&] {
    return SamplingError("could not sample a state satisfying constraint '" +
                         to_string(constraint) + "' for n = " + std::to_string(n) + " within " +
                         std::to_string(max_attempts) + " proposals");
  };

  double min_gap = -1.0;
  if (constraint == InitConstraint::InOmegaE) {
    min_gap = std::numbers::pi - 2.0 * std::numbers::pi / static_cast<double>(n);
  } else if (constraint == InitConstraint::InOmegaO) {
    min_gap = std::max(std::numbers::pi - 3.0 * std::numbers::pi / static_cast<double>(n),
                       std::numbers::pi / 2);
  }

  std::size_t attempts = 0;
  if (min_gap >= 0.0) {
    while (true) {
      x[0] = sample_unit(rng, normal);
      for (std::size_t i = 1; i < n; ++i) {
        do {
          if (++attempts > max_attempts) throw fail();
          x[i] = sample_unit(rng, normal);
        } while (!(geodesic_distance(x[i - 1], x[i]) > min_gap));
      }
      if (geodesic_distance(x[n - 1], x[0]) > min_gap) break;
    }
    return SystemState::from_vectors(x);
  }

  while (true) {
    if (++attempts > max_attempts) throw fail();
    for (auto& v : x) v = sample_unit(rng, normal);
    if (constraint == InitConstraint::None) break;
    Vec3 mean = Vec3::Zero();
    for (const auto& v : x) mean += v;
    if (mean.norm() < 1e-12) continue;
    mean.normalize();
    if (std::all_of(x.begin(), x.end(), [&](const Vec3& v) { return mean.dot(v) > 0.0; })) break;
  }
  return SystemState::from_vectors(x);
}

void SimConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive and finite");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (init.kind == InitSpec::Kind::Explicit && init.angles.size() != n) {
    throw ConfigError("explicit initial state has " + std::to_string(init.angles.size()) +
                      " agents, expected " + std::to_string(n));
  }
}

SystemState initial_state(const SimConfig& cfg) {
  switch (cfg.init.kind) {
    case InitSpec::Kind::Random: return random_state(cfg.n, cfg.seed, InitConstraint::None);
    case InitSpec::Kind::RandomInOmegaE:
      return random_state(cfg.n, cfg.seed, InitConstraint::InOmegaE);
    case InitSpec::Kind::RandomInOmegaO:
      return random_state(cfg.n, cfg.seed, InitConstraint::InOmegaO);
    case InitSpec::Kind::RandomHemisphere:
      return random_state(cfg.n, cfg.seed, InitConstraint::Hemisphere);
    case InitSpec::Kind::Explicit: return SystemState::from_angles(cfg.init.angles);
  }
  throw ConfigError("unknown init kind");
}

Trajectory simulate(const SimConfig& cfg) {
  cfg.validate();
  const RingGraph g(cfg.n, cfg.directed);
  auto x = initial_state(cfg).vectors();

  const auto total_steps =
      static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));

  Trajectory traj;
  std::vector<Vec3> omega(cfg.n);
  std::vector<double> norms(cfg.n);
  // (W, |omega_i|...) per step, for the rotating steady-state test.
  std::deque<std::vector<double>> history;

  for (std::size_t k = 0;; ++k) {
    omega_raw(x, g, cfg.law, omega);
    for (std::size_t i = 0; i < cfg.n; ++i) norms[i] = omega[i].norm();
    for (const auto& v : x) {
      if (!v.allFinite()) throw NumericalError("non-finite state at step " + std::to_string(k));
    }

    const SystemState state = SystemState::from_vectors(x);
    const double w = min_edge_distance(state);
    const double max_rate = *std::max_element(norms.begin(), norms.end());

    bool stop = k >= total_steps;
    if (cfg.early_stop && !stop) {
      if (max_rate < kStaticOmegaTol) {
        traj.stop_reason = StopReason::StaticEquilibrium;
        stop = true;
      } else if (cfg.directed) {
        std::vector<double> snapshot{w};
        snapshot.insert(snapshot.end(), norms.begin(), norms.end());
        if (history.size() == kRotatingLag) {
          const auto& old = history.front();
          bool steady = true;
          for (std::size_t c = 0; c < snapshot.size() && steady; ++c) {
            steady = std::abs(snapshot[c] - old[c]) <= kRotatingTol;
          }
          if (steady) {
            traj.stop_reason = StopReason::RotatingSteadyState;
            stop = true;
          }
          history.pop_front();
        }
        history.push_back(std::move(snapshot));
      }
    }

    if (k % cfg.record_every == 0 || stop) {
      traj.times.push_back(static_cast<double>(k) * cfg.dt);
      traj.W.push_back(w);
      traj.V.push_back(lyapunov_v(state));
      traj.omega_norms.push_back(norms);
      traj.states.push_back(state);
    }
    if (stop) {
      traj.steps = k;
      break;
    }
    traj.max_norm_drift =
        std::max(traj.max_norm_drift, advance(x, g, cfg.law, cfg.dt, cfg.integrator));
  }
  return traj;
}

}  // namespace ringform
