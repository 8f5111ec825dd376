#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ringform/dynamics.hpp"

namespace ringform {

using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Great-circle equilibria
// ---------------------------------------------------------------------------

/// Points on the great circle orthogonal to `axis`: Gamma_1 = base and
/// Gamma_{i+1} = exp(step_angles[i] hat(axis)) Gamma_i.
struct GreatCircleConfig {
  Vec3 axis = Vec3::UnitZ();
  Vec3 base = Vec3::UnitX();
  std::vector<double> step_angles;  // n - 1 signed angles
};

/// Throws DomainError unless axis and base are unit and orthogonal (1e-12).
SystemState make_great_circle(const GreatCircleConfig& cfg);

/// Gamma_i = exp((i-1) alpha hat(u)) v.
SystemState make_equispaced_circle(std::size_t n, double alpha, const Vec3& u, const Vec3& v);

/// max_i |sum_{j in N_i} Gamma_i x Gamma_j|: zero exactly on the equilibrium set.
double equilibrium_residual(const SystemState& state, const RingGraph& g);

/// Rotates the state so that the great circle with normal `u` becomes the
/// equator: angle arccos(u . e3) about hat(u) e3 / sin(angle). No-op when
/// u = +-e3.
SystemState normalize_to_equator(const SystemState& state, const Vec3& u);

/// Linearized (psi, phi) dynamics about an equatorial equilibrium:
///   A_psi[i][i] = sum_{j in N_i} cos(theta_ij),  A_psi[i][j] = -cos(theta_ij)
///   A_phi[i][i] = sum_{j in N_i} cos(theta_ij),  A_phi[i][j] = -1
/// (entries accumulate for repeated neighbors). Throws DomainError when some
/// agent is off the equator by more than 1e-9 rad.
Matrix jacobian_psi(const SystemState& eq_state, const RingGraph& g);
Matrix jacobian_phi(const SystemState& eq_state, const RingGraph& g);

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
  std::size_t sweeps = 0;      // Jacobi rotations applied
};

/// Classical Jacobi rotation method (largest off-diagonal pivot) run until
/// the off-diagonal Frobenius norm falls below 1e-13 |M|_F. Throws
/// DomainError when M is not symmetric to 1e-12 (relative to its scale).
SymmetricEigen symmetric_eigen(const Matrix& m);
std::vector<double> symmetric_eigenvalues(const Matrix& m);

/// lambda_l = 2 [cos(alpha) - cos((l-1) 2 pi / n)], l = 1..n (in that order):
/// the spectrum of the circulant A_phi of an equispaced circle with step alpha.
std::vector<double> circulant_eigenvalues(double alpha, std::size_t n);

enum class SpectralVerdict { Stable, Unstable, Degenerate };

std::string to_string(SpectralVerdict v);

struct SpectrumReport {
  std::string matrix_name;
  std::vector<double> eigenvalues;  // ascending
  std::size_t n_zero = 0;
  std::size_t n_negative = 0;
  std::size_t n_positive = 0;
  SpectralVerdict verdict = SpectralVerdict::Degenerate;
};

/// Counts with |lambda| < zero_tol * max(1, spectral radius) taken as zero.
SpectrumReport make_spectrum_report(std::string name, std::vector<double> eigenvalues,
                                    double zero_tol = 1e-8);

struct EquilibriumReport {
  SpectrumReport psi;
  SpectrumReport phi;
  std::size_t n_zero = 0;
  std::size_t n_negative = 0;
  std::size_t n_positive = 0;
  SpectralVerdict verdict = SpectralVerdict::Degenerate;
  Vec3 circle_axis = Vec3::UnitZ();
  double residual = 0.0;
};

/// Spectral classification of an undirected-ring equilibrium. The great
/// circle through the state is fitted, rotated onto the equator, and both
/// Jacobians are diagonalized. Throws DomainError for directed rings or when
/// the equilibrium residual exceeds 1e-9.
EquilibriumReport classify_equilibrium(const SystemState& eq_state, const RingGraph& g,
                                       double zero_tol = 1e-8);

}  // namespace ringform
