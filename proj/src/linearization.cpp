#include "ringform/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ringform/analysis.hpp"
#include "ringform/errors.hpp"

namespace ringform {

namespace {

constexpr double kEquatorTol = 1e-9;
constexpr double kEquilibriumTol = 1e-9;

void require_equatorial(const SystemState& s, const RingGraph& g) {
  if (s.size() != g.size()) throw DomainError("state does not match ring size");
  for (const auto& a : s) {
    if (std::abs(std::asin(std::clamp(a.z(), -1.0, 1.0))) > kEquatorTol) {
      throw DomainError(
          "linearization expects an equatorial equilibrium; rotate it with "
          "normalize_to_equator first");
    }
  }
}

}  // namespace

SystemState make_great_circle(const GreatCircleConfig& cfg) {
  if (std::abs(cfg.axis.norm() - 1.0) > 1e-12 || std::abs(cfg.base.norm() - 1.0) > 1e-12 ||
      std::abs(cfg.axis.dot(cfg.base)) > 1e-12) {
    throw DomainError("great circle needs orthonormal axis and base");
  }
  std::vector<ReducedAttitude> agents{ReducedAttitude(cfg.base)};
  Vec3 current = cfg.base;
  for (double step : cfg.step_angles) {
    current = rotate(current, cfg.axis, step);
    agents.emplace_back(current);
  }
  return SystemState(std::move(agents));
}

SystemState make_equispaced_circle(std::size_t n, double alpha, const Vec3& u, const Vec3& v) {
  if (std::abs(u.norm() - 1.0) > 1e-12 || std::abs(v.norm() - 1.0) > 1e-12 ||
      std::abs(u.dot(v)) > 1e-12) {
    throw DomainError("equispaced circle needs orthonormal u and v");
  }
  std::vector<ReducedAttitude> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents.push_back(rotate(ReducedAttitude(v), u, static_cast<double>(i) * alpha));
  }
  return SystemState(std::move(agents));
}

double equilibrium_residual(const SystemState& state, const RingGraph& g) {
  double r = 0.0;
  for (const auto& w : control_omega(state, g, ControlLaw::Repulsive)) r = std::max(r, w.norm());
  return r;
}

SystemState normalize_to_equator(const SystemState& state, const Vec3& u) {
  const Vec3 axis = u.cross(Vec3::UnitZ());
  const double s = axis.norm();
  if (s < 1e-15) return state;
  const double angle = std::acos(std::clamp(u.normalized().z(), -1.0, 1.0));
  return state.rotated(axis / s, angle);
}

Matrix jacobian_psi(const SystemState& eq_state, const RingGraph& g) {
  require_equatorial(eq_state, g);
  const std::size_t n = g.size();
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : g.neighbors(i)) {
      const double c = eq_state[i].vec().dot(eq_state[j].vec());
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += c;
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= c;
    }
  }
  return a;
}

Matrix jacobian_phi(const SystemState& eq_state, const RingGraph& g) {
  require_equatorial(eq_state, g);
  const std::size_t n = g.size();
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : g.neighbors(i)) {
      const double c = eq_state[i].vec().dot(eq_state[j].vec());
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += c;
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= 1.0;
    }
  }
  return a;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("eigenvalue solver needs a square matrix");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("Jacobi eigenvalue solver needs a symmetric matrix");
  }

  Matrix a = 0.5 * (m + m.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double target = 1e-13 * a.norm();
  const auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    }
    return std::sqrt(s);
  };

  SymmetricEigen out;
  const std::size_t max_rotations = 100 * static_cast<std::size_t>(n * n) + 100;
  while (n > 1 && off_norm() > target && out.sweeps < max_rotations) {
    Eigen::Index p = 0;
    Eigen::Index q = 1;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = r + 1; c < n; ++c) {
        if (std::abs(a(r, c)) > std::abs(a(p, q))) {
          p = r;
          q = c;
        }
      }
    }
    const double apq = a(p, q);
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
    const double c = 1.0 / std::hypot(t, 1.0);
    const double s = t * c;

    a(p, p) -= t * apq;
    a(q, q) += t * apq;
    a(p, q) = a(q, p) = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r != p && r != q) {
        const double arp = a(r, p);
        const double arq = a(r, q);
        a(r, p) = a(p, r) = c * arp - s * arq;
        a(r, q) = a(q, r) = s * arp + c * arq;
      }
      const double vrp = v(r, p);
      const double vrq = v(r, q);
      v(r, p) = c * vrp - s * vrq;
      v(r, q) = s * vrp + c * vrq;
    }
    ++out.sweeps;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values.push_back(a(src, src));
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) { return symmetric_eigen(m).values; }

std::vector<double> circulant_eigenvalues(double alpha, std::size_t n) {
  if (n < 2) throw DomainError("circulant spectrum needs n >= 2");
  std::vector<double> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    out[l] = 2.0 * (std::cos(alpha) - std::cos(static_cast<double>(l) * 2.0 *
                                                std::numbers::pi / static_cast<double>(n)));
  }
  return out;
}

std::string to_string(SpectralVerdict v) {
  switch (v) {
    case SpectralVerdict::Stable: return "Stable";
    case SpectralVerdict::Unstable: return "Unstable";
    case SpectralVerdict::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

namespace {

SpectralVerdict verdict_for(std::size_t zero, std::size_t positive) {
  if (positive > 0) return SpectralVerdict::Unstable;
  return zero > 0 ? SpectralVerdict::Degenerate : SpectralVerdict::Stable;
}

}  // namespace

SpectrumReport make_spectrum_report(std::string name, std::vector<double> eigenvalues,
                                    double zero_tol) {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  double radius = 0.0;
  for (double l : eigenvalues) radius = std::max(radius, std::abs(l));
  const double cut = zero_tol * std::max(1.0, radius);

  SpectrumReport r;
  r.matrix_name = std::move(name);
  for (double l : eigenvalues) {
    if (std::abs(l) < cut) {
      ++r.n_zero;
    } else if (l < 0.0) {
      ++r.n_negative;
    } else {
      ++r.n_positive;
    }
  }
  r.eigenvalues = std::move(eigenvalues);
  r.verdict = verdict_for(r.n_zero, r.n_positive);
  return r;
}

EquilibriumReport classify_equilibrium(const SystemState& eq_state, const RingGraph& g,
                                       double zero_tol) {
  if (g.directed()) {
    throw DomainError("spectral classification is only defined for undirected rings");
  }
  EquilibriumReport out;
  out.residual = equilibrium_residual(eq_state, g);
  if (out.residual > kEquilibriumTol) {
    throw DomainError("state is not an equilibrium (residual " + std::to_string(out.residual) +
                      ")");
  }
  out.circle_axis = fit_great_circle_axis(eq_state);
  const SystemState eq = normalize_to_equator(eq_state, out.circle_axis);
  out.psi = make_spectrum_report("A_psi", symmetric_eigenvalues(jacobian_psi(eq, g)), zero_tol);
  out.phi = make_spectrum_report("A_phi", symmetric_eigenvalues(jacobian_phi(eq, g)), zero_tol);
  out.n_zero = out.psi.n_zero + out.phi.n_zero;
  out.n_negative = out.psi.n_negative + out.phi.n_negative;
  out.n_positive = out.psi.n_positive + out.phi.n_positive;
  out.verdict = verdict_for(out.n_zero, out.n_positive);
  return out;
}

}  // namespace ringform
