#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringform/dynamics.hpp"

namespace ringform {

// Formation functionals. All ring-edge quantities use the edge (i, i+1 mod n).

/// W: smallest geodesic distance between ring neighbors.
double min_edge_distance(const SystemState& state);

/// V_i = 1 + Gamma_i . Gamma_{i+1} = 2 cos^2(theta_{i,i+1} / 2), evaluated as
/// |Gamma_i + Gamma_{i+1}|^2 / 2 so it stays accurate near antipodal pairs.
double edge_potential(const SystemState& state, std::size_t i);

/// V = max_i V_i = 2 cos^2(W / 2), in [0, 2].
double lyapunov_v(const SystemState& state);

/// dV_i/dt along the closed loop.
double edge_potential_rate(const SystemState& state, const RingGraph& g, std::size_t i,
                           ControlLaw law = ControlLaw::Repulsive);

/// Upper right Dini derivative of V: the largest V_i rate over the active
/// set {i : V - V_i <= active_tol}.
double dini_derivative(const SystemState& state, const RingGraph& g,
                       double active_tol = 1e-9, ControlLaw law = ControlLaw::Repulsive);

/// sum_i V_i and its rate -sum_i |sum_{j in N_i} Gamma_i x Gamma_j|^2.
/// Undirected rings only (DomainError otherwise).
double potential_sum(const SystemState& state);
double potential_sum_rate(const SystemState& state, const RingGraph& g);

// Distances to the formation manifolds, measured in the max-over-agents
// metric of (S^2)^n.

/// Antipodal set M_e = {Gamma_i = (-1)^(i-1) v}. Even n only.
SystemState antipodal_formation(std::size_t n, const Vec3& v);

/// Cyclic set M_o = {Gamma_i = exp((i-1)(pi - pi/n) hat(u)) v, u . v = 0}. Odd n only.
SystemState cyclic_formation(std::size_t n, const Vec3& u, const Vec3& v);

/// Max distance to the candidate Gamma~_i = (-1)^(i + n/2) Gamma_{n/2}.
double antipodal_distance_upper(const SystemState& state);

struct CyclicUpper {
  double distance = 0.0;
  bool degenerate_axis = false;  // theta_12 in {0, pi}; axis from degenerate_axis()
};

/// Max distance to the candidate exp((i-1)(pi - pi/n) hat(k_12)) Gamma_1.
CyclicUpper cyclic_distance_upper(const SystemState& state);

struct SearchOptions {
  std::size_t resolution = 4096;       // sphere samples for v (M_e) or u (M_o)
  std::size_t angle_resolution = 512;  // in-plane angles for v (M_o)
  double refine_tol = 1e-7;            // simplex size at which refinement stops
};

/// min over v of max_i d(Gamma_i, (-1)^(i-1) v). Global sample search over a
/// nested low-discrepancy point sequence followed by Nelder-Mead refinement.
/// Non-increasing in opts.resolution.
double antipodal_distance(const SystemState& state, const SearchOptions& opts = {});

/// min over orthonormal (u, v) of max_i d(Gamma_i, exp((i-1)(pi - pi/n) hat(u)) v).
double cyclic_distance(const SystemState& state, const SearchOptions& opts = {});

enum class FormationKind {
  Antipodal,
  CyclicStatic,
  CyclicRotating,
  Consensus,
  GreatCircleEquilibrium,
  Other
};

std::string to_string(FormationKind k);

struct FormationClass {
  FormationKind kind = FormationKind::Other;
  double residual = 0.0;  // radians (or rad/s for a velocity-based verdict)
};

/// Verdict in the order Antipodal, CyclicStatic, CyclicRotating, Consensus,
/// GreatCircleEquilibrium, Other. `omega_norms` are the agents' |omega_i|.
FormationClass classify_formation(const SystemState& state, const RingGraph& g,
                                  std::span<const double> omega_norms, double tol = 1e-3,
                                  const SearchOptions& opts = {});

/// Largest pairwise geodesic distance.
double max_pairwise_distance(const SystemState& state);

/// Unit normal of the best-fit great circle (smallest eigenvector of the
/// scatter matrix sum Gamma_i Gamma_i^T).
Vec3 fit_great_circle_axis(const SystemState& state);

struct BoundCheckReport {
  std::string name;
  bool applicable = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // oriented so that slack >= 0 means the bound holds
  bool holds = true;
  std::optional<double> nu;
};

/// Holds-threshold on the oriented slack. Matches the accuracy of the
/// distance search, which stops refining at 1e-7 in its chart coordinates.
inline constexpr double kBoundSlackTol = 1e-6;

/// Distance/W relations for the parity of state.size():
///   even: W >= pi - 2 d_Me;  d_Me <= (n/2)(pi - W)
///   odd:  W >= pi - pi/n - 2 d_Mo;
///         d_Mo <= sqrt(4 n^3 (pi - pi/n - W))  when that root is <= 2 sqrt 2;
///         d_Mo <= 2 n nu with nu = sqrt(max_i |pi - pi/n - theta_{i,i+1}|)
///         when nu <= sqrt 2 / n (checked for both the exact distance and
///         the explicit candidate of cyclic_distance_upper).
/// Gated bounds whose hypothesis fails come back with applicable = false.
std::vector<BoundCheckReport> check_bounds(const SystemState& state,
                                           const SearchOptions& opts = {});

}  // namespace ringform
