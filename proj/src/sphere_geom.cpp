#include "ringform/sphere_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ringform/errors.hpp"

namespace ringform {

ReducedAttitude::ReducedAttitude(const Vec3& v) {
  const double norm = v.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw DomainError("reduced attitude needs a finite non-zero vector");
  }
  v_ = v / norm;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

double geodesic_distance(const Vec3& a, const Vec3& b) {
  // atan2 form of arccos(clamp(a.b)); keeps full precision near 0 and pi.
  return std::atan2(a.cross(b).norm(), std::clamp(a.dot(b), -1.0, 1.0));
}

double geodesic_distance(const ReducedAttitude& a, const ReducedAttitude& b) {
  return geodesic_distance(a.vec(), b.vec());
}

Vec3 degenerate_axis(const Vec3& a) {
  int k = 0;
  for (int j = 1; j < 3; ++j) {
    if (std::abs(a[j]) < std::abs(a[k])) k = j;
  }
  return a.cross(Vec3::Unit(k)).normalized();
}

AxisAngle relative_axis_angle(const ReducedAttitude& a, const ReducedAttitude& b) {
  const Vec3 c = a.vec().cross(b.vec());
  const double s = c.norm();
  AxisAngle out;
  out.angle = geodesic_distance(a, b);
  if (s <= 1e-15) {
    out.axis = degenerate_axis(a.vec());
    out.degenerate = true;
  } else {
    out.axis = c / s;
  }
  return out;
}

Vec3 rotate(const Vec3& p, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * p + s * axis.cross(p) + (1.0 - c) * axis.dot(p) * axis;
}

ReducedAttitude rotate(const ReducedAttitude& p, const Vec3& axis, double angle) {
  return ReducedAttitude(rotate(p.vec(), axis, angle));
}

ReducedAttitude angles_to_vec(const SphereAngles& s) {
  const double cphi = std::cos(s.phi);
  return ReducedAttitude(std::cos(s.psi) * cphi, std::sin(s.psi) * cphi, std::sin(s.phi));
}

SphereAngles vec_to_angles(const ReducedAttitude& p) {
  const Vec3& v = p.vec();
  const double rho = std::hypot(v.x(), v.y());
  SphereAngles out;
  out.phi = std::atan2(v.z(), rho);
  if (rho == 0.0) {
    out.psi = 0.0;
    return out;
  }
  out.psi = std::atan2(v.y(), v.x());
  if (out.psi >= std::numbers::pi) out.psi -= 2.0 * std::numbers::pi;
  return out;
}

bool great_circle_test(const ReducedAttitude& a, const ReducedAttitude& b,
                       const ReducedAttitude& c, double tol) {
  const double ab = geodesic_distance(a, b);
  const double ac = geodesic_distance(a, c);
  const double bc = geodesic_distance(b, c);
  return std::abs(ab - std::abs(ac - bc)) <= tol ||
         std::abs(ab - (ac + bc)) <= tol ||
         std::abs(ab + ac + bc - 2.0 * std::numbers::pi) <= tol;
}

}  // namespace ringform
