#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "ringform/analysis.hpp"
#include "ringform/errors.hpp"

using namespace ringform;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).norm());
  return d;
}

double state_gap(const SystemState& a, const SystemState& b) {
  return max_diff(a.vectors(), b.vectors());
}

}  // namespace

TEST_CASE("closed loop matches the expanded triple-product form") {
  gen::Engine rng(21);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 8;
    const auto s = gen::state(rng, n);
    for (bool directed : {false, true}) {
      const RingGraph g(n, directed);
      const auto xdot = rhs_cartesian(s, g, ControlLaw::Repulsive);
      std::vector<Vec3> oracle(n, Vec3::Zero());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : g.neighbors(i)) {
          oracle[i] += s[i].vec() * s[i].vec().dot(s[j].vec()) - s[j].vec();
        }
      }
      CHECK(max_diff(xdot, oracle) < 1e-13);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(xdot[i].dot(s[i].vec())) < 1e-14);
      const auto back = rhs_cartesian(s, g, ControlLaw::Consensus);
      for (std::size_t i = 0; i < n; ++i) CHECK((back[i] + xdot[i]).norm() < 1e-15);
    }
  }
}

TEST_CASE("control law commutes with global rotations") {
  gen::Engine rng(22);
  for (int k = 0; k < 100; ++k) {
    const auto s = gen::state(rng, 5);
    const Vec3 axis = gen::unit(rng);
    const double angle = gen::uniform(rng, -kPi, kPi);
    const RingGraph g(5, k % 2 == 0);
    const auto a = control_omega(s.rotated(axis, angle), g, ControlLaw::Repulsive);
    const auto b = control_omega(s, g, ControlLaw::Repulsive);
    for (std::size_t i = 0; i < 5; ++i) CHECK((a[i] - rotate(b[i], axis, angle)).norm() < 1e-13);
  }
}

TEST_CASE("two agents at a right angle: undirected edge rate is twice the directed one") {
  const auto s = SystemState::from_vectors(std::vector<Vec3>{Vec3::UnitX(), Vec3::UnitY()});
  CHECK(edge_potential_rate(s, RingGraph(2, false), 0) == doctest::Approx(-4.0));
  CHECK(edge_potential_rate(s, RingGraph(2, true), 0) == doctest::Approx(-2.0));
}

TEST_CASE("angle form rejects polar agents") {
  const std::vector<SphereAngles> a{{0.0, kPi / 2}, {1.0, 0.0}, {2.0, 0.1}};
  CHECK_THROWS_AS(rhs_angles(a, RingGraph(3, false), ControlLaw::Repulsive), DomainError);
  CHECK_THROWS_AS(rhs_angles(a, RingGraph(4, false), ControlLaw::Repulsive), DomainError);
}

TEST_CASE("Lie-Euler keeps agents on the sphere") {
  gen::Engine rng(23);
  auto s = gen::state(rng, 6);
  const RingGraph g(6, false);
  for (int k = 0; k < 1000; ++k) s = step(s, g, ControlLaw::Repulsive, 0.05);
  for (const auto& a : s) CHECK(std::abs(a.vec().norm() - 1.0) < 1e-15);
  CHECK_THROWS_AS(step(s, g, ControlLaw::Repulsive, 0.0), ConfigError);
}

TEST_CASE("observed convergence orders: Lie-Euler 1, RK4 4") {
  gen::Engine rng(24);
  const auto s0 = gen::state(rng, 5);
  const RingGraph g(5, false);
  const double t_end = 0.5;
  const auto integrate = [&](Integrator integ, double dt) {
    auto s = s0;
    const auto steps = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < steps; ++k) s = step(s, g, ControlLaw::Repulsive, dt, integ);
    return s;
  };
  const auto reference = integrate(Integrator::AmbientRk4, 1e-4);
  const double e_rk1 = state_gap(integrate(Integrator::AmbientRk4, 0.05), reference);
  const double e_rk2 = state_gap(integrate(Integrator::AmbientRk4, 0.025), reference);
  const double e_le1 = state_gap(integrate(Integrator::LieEuler, 0.01), reference);
  const double e_le2 = state_gap(integrate(Integrator::LieEuler, 0.005), reference);
  CHECK(e_rk1 / e_rk2 == doctest::Approx(16.0).epsilon(0.25));
  CHECK(e_le1 / e_le2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("edge potential rate matches a central difference of the flow") {
  // Consensus is the exact time reversal of the repulsive flow, so one RK4
  // step of each gives V_i at +h and -h.
  gen::Engine rng(25);
  const double h = 1e-4;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + k % 6;
    const auto s = gen::state(rng, n);
    const RingGraph g(n, k % 2 == 1);
    const auto fwd = step(s, g, ControlLaw::Repulsive, h, Integrator::AmbientRk4);
    const auto bwd = step(s, g, ControlLaw::Consensus, h, Integrator::AmbientRk4);
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (edge_potential(fwd, i) - edge_potential(bwd, i)) / (2.0 * h);
      CHECK(edge_potential_rate(s, g, i) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
    if (!g.directed()) {
      const double fd = (potential_sum(fwd) - potential_sum(bwd)) / (2.0 * h);
      CHECK(potential_sum_rate(s, g) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("potential sum never increases on undirected rings and is flat on equilibria") {
  gen::Engine rng(26);
  for (int k = 0; k < 300; ++k) {
    const auto s = gen::state(rng, 3 + k % 6);
    CHECK(potential_sum_rate(s, RingGraph(s.size(), false)) <= 0.0);
  }
  const auto eq = antipodal_formation(6, Vec3::UnitZ());
  CHECK(std::abs(potential_sum_rate(eq, RingGraph(6, false))) < 1e-28);
  CHECK_THROWS_AS(potential_sum_rate(eq, RingGraph(6, true)), DomainError);
}

TEST_CASE("cyclic formation on a directed ring rotates at sin(pi/n)") {
  for (std::size_t n : {3, 5, 7, 9}) {
    const auto s = cyclic_formation(n, Vec3::UnitZ(), Vec3::UnitX());
    for (const auto& w : control_omega(s, RingGraph(n, true), ControlLaw::Repulsive)) {
      CHECK(w.norm() == doctest::Approx(std::sin(kPi / static_cast<double>(n))).epsilon(1e-13));
    }
    for (const auto& w : control_omega(s, RingGraph(n, false), ControlLaw::Repulsive)) {
      CHECK(w.norm() < 1e-14);
    }
  }
}

TEST_CASE("random states: reproducible and constraint-respecting") {
  const auto a = random_state(6, 7, InitConstraint::None);
  const auto b = random_state(6, 7, InitConstraint::None);
  const auto c = random_state(6, 8, InitConstraint::None);
  CHECK(state_gap(a, b) == 0.0);
  CHECK(state_gap(a, c) > 0.1);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto e = random_state(6, seed, InitConstraint::InOmegaE);
    CHECK(min_edge_distance(e) > kPi - 2.0 * kPi / 6.0);
    const auto o = random_state(7, seed, InitConstraint::InOmegaO);
    CHECK(min_edge_distance(o) > std::max(kPi - 3.0 * kPi / 7.0, kPi / 2.0));
    const auto h = random_state(5, seed, InitConstraint::Hemisphere);
    Vec3 m = Vec3::Zero();
    for (const auto& p : h) m += p.vec();
    for (const auto& p : h) CHECK(m.dot(p.vec()) > 0.0);
  }
  CHECK_THROWS_AS(random_state(10, 3, InitConstraint::InOmegaE, 3), SamplingError);
  CHECK_THROWS_AS(random_state(1, 3, InitConstraint::None), ConfigError);
}

TEST_CASE("unconstrained samples are centred") {
  // Each coordinate of a uniform point has mean 0 and variance 1/3.
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (const auto& p : random_state(5, seed, InitConstraint::None)) {
      sum += p.vec();
      ++count;
    }
  }
  const double sigma = std::sqrt(1.0 / 3.0 / static_cast<double>(count));
  CHECK(sum.cwiseAbs().maxCoeff() / static_cast<double>(count) < 5.0 * sigma);
}

TEST_CASE("simulate records what it promises") {
  SimConfig cfg;
  cfg.n = 5;
  cfg.t_end = 2.0;
  cfg.dt = 0.01;
  cfg.record_every = 7;
  cfg.early_stop = false;
  const auto tr = simulate(cfg);
  CHECK(tr.steps == 200);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(2.0));
  CHECK(tr.size() == 200 / 7 + 2);
  CHECK(tr.stop_reason == StopReason::Horizon);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(tr.W[k] == min_edge_distance(tr.states[k]));
    CHECK(tr.V[k] == lyapunov_v(tr.states[k]));
    CHECK(tr.omega_norms[k].size() == 5);
  }
  CHECK(tr.max_norm_drift < 1e-14);

  const auto again = simulate(cfg);
  CHECK(state_gap(again.states.back(), tr.states.back()) == 0.0);
}

TEST_CASE("simulate stops early at equilibria") {
  SimConfig cfg;
  cfg.n = 4;
  cfg.init.kind = InitSpec::Kind::RandomInOmegaE;
  const auto tr = simulate(cfg);
  CHECK(tr.stop_reason == StopReason::StaticEquilibrium);
  CHECK(tr.times.back() < cfg.t_end);

  cfg.n = 5;
  cfg.directed = true;
  cfg.init.kind = InitSpec::Kind::Random;
  const auto rot = simulate(cfg);
  CHECK(rot.stop_reason == StopReason::RotatingSteadyState);
}

TEST_CASE("explicit initial state and config validation") {
  SimConfig cfg;
  cfg.n = 3;
  cfg.init.kind = InitSpec::Kind::Explicit;
  cfg.init.angles = {{0.0, 0.1}, {2.0, -0.2}, {-2.0, 0.3}};
  const auto s = initial_state(cfg);
  CHECK(vec_to_angles(s[1]).psi == doctest::Approx(2.0));
  cfg.init.angles.pop_back();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  SimConfig bad;
  bad.dt = -1.0;
  CHECK_THROWS_AS(simulate(bad), ConfigError);
  bad = SimConfig{};
  bad.record_every = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SimConfig{};
  bad.n = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("trajectories are equivariant under global rotation") {
  gen::Engine rng(27);
  const auto s = gen::state(rng, 6);
  const Vec3 axis = gen::unit(rng);
  SimConfig cfg;
  cfg.n = 6;
  cfg.t_end = 5.0;
  cfg.early_stop = false;
  cfg.init.kind = InitSpec::Kind::Explicit;
  for (const auto& a : s) cfg.init.angles.push_back(vec_to_angles(a));
  const auto base = simulate(cfg);
  cfg.init.angles.clear();
  for (const auto& a : s.rotated(axis, 1.0)) cfg.init.angles.push_back(vec_to_angles(a));
  const auto turned = simulate(cfg);
  CHECK(state_gap(base.states.back().rotated(axis, 1.0), turned.states.back()) < 1e-10);
  CHECK(base.W.back() == doctest::Approx(turned.W.back()).epsilon(1e-10));
}
