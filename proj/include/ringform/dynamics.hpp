#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ringform/sphere_geom.hpp"
#include "ringform/topology.hpp"

namespace ringform {

/// The point (Gamma_1, ..., Gamma_n) of (S^2)^n. Index 0 is agent 1.
class SystemState {
 public:
  SystemState() = default;
  explicit SystemState(std::vector<ReducedAttitude> agents) : agents_(std::move(agents)) {}
  /// Normalizes each vector.
  static SystemState from_vectors(std::span<const Vec3> vs);
  static SystemState from_angles(std::span<const SphereAngles> angles);

  std::size_t size() const { return agents_.size(); }
  const ReducedAttitude& operator[](std::size_t i) const { return agents_[i]; }
  auto begin() const { return agents_.begin(); }
  auto end() const { return agents_.end(); }

  std::vector<Vec3> vectors() const;
  std::vector<SphereAngles> angles() const;

  /// Applies one rotation to every agent.
  SystemState rotated(const Vec3& axis, double angle) const;

 private:
  std::vector<ReducedAttitude> agents_;
};

/// Repulsive: omega_i = -sum_j Gamma_i x Gamma_j (antagonistic neighbors).
/// Consensus: the sign-reversed protocol.
enum class ControlLaw { Repulsive, Consensus };

/// LieEuler rotates each agent by its own angular velocity over dt and so
/// stays on the sphere exactly. AmbientRk4 is classical RK4 in R^3 with
/// per-step renormalization, kept for order-of-accuracy studies.
enum class Integrator { LieEuler, AmbientRk4 };

std::string to_string(ControlLaw law);
std::string to_string(Integrator integrator);

/// Angular velocities commanded by the control law, one per agent.
std::vector<Vec3> control_omega(const SystemState& state, const RingGraph& g, ControlLaw law);

/// Closed-loop velocities dGamma_i/dt = omega_i x Gamma_i (tangent vectors).
std::vector<Vec3> rhs_cartesian(const SystemState& state, const RingGraph& g, ControlLaw law);

struct AngleRates {
  double psi_dot = 0.0;
  double phi_dot = 0.0;
};

/// Closed loop written in (psi, phi) coordinates. Throws DomainError when an
/// agent is within 1e-6 rad of a pole.
std::vector<AngleRates> rhs_angles(std::span<const SphereAngles> angles, const RingGraph& g,
                                   ControlLaw law);

/// One integration step of length dt > 0.
SystemState step(const SystemState& state, const RingGraph& g, ControlLaw law, double dt,
                 Integrator integrator = Integrator::LieEuler);

enum class InitConstraint { None, InOmegaE, InOmegaO, Hemisphere };

std::string to_string(InitConstraint c);

/// Uniform sample on (S^2)^n (normalized Gaussians from std::mt19937_64
/// seeded with `seed`), conditioned on `constraint` by rejection.
///
/// InOmegaE: W > pi - 2pi/n. InOmegaO: W > max(pi - 3pi/n, pi/2).
/// Hemisphere: the normalized mean m has m.Gamma_i > 0 for all i.
///
/// For the Omega constraints each agent after the first is drawn uniformly
/// outside the excluded cap around its predecessor and the whole state is
/// accepted when the closing edge (n, 1) also passes. Because the excluded
/// cap has the same area wherever the predecessor sits, accepted states are
/// uniform on the constrained set. Throws SamplingError after `max_attempts`
/// rejected proposals.
SystemState random_state(std::size_t n, std::uint64_t seed, InitConstraint constraint,
                         std::size_t max_attempts = 10'000'000);

struct InitSpec {
  enum class Kind { Random, RandomInOmegaE, RandomInOmegaO, RandomHemisphere, Explicit };
  Kind kind = Kind::Random;
  std::vector<SphereAngles> angles;  // Explicit only
};

struct SimConfig {
  std::size_t n = 6;
  bool directed = false;
  ControlLaw law = ControlLaw::Repulsive;
  Integrator integrator = Integrator::LieEuler;
  double dt = 0.01;
  double t_end = 100.0;
  std::uint64_t seed = 1;
  InitSpec init;
  std::size_t record_every = 1;
  bool early_stop = true;

  /// Throws ConfigError.
  void validate() const;
};

enum class StopReason { Horizon, StaticEquilibrium, RotatingSteadyState };

std::string to_string(StopReason r);

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<double> W;
  std::vector<double> V;
  std::vector<std::vector<double>> omega_norms;
  StopReason stop_reason = StopReason::Horizon;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;

  std::size_t size() const { return times.size(); }
};

/// Deterministic for a fixed config. Records step 0, every `record_every`
/// steps, and the final step. Early stop (when enabled): max |omega_i| <
/// 1e-10, or on directed rings W and every |omega_i| within 1e-10 of their
/// values 1000 steps earlier.
Trajectory simulate(const SimConfig& cfg);

/// Initial state selected by cfg.init (and cfg.seed).
SystemState initial_state(const SimConfig& cfg);

}  // namespace ringform
