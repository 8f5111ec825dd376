#pragma once

#include <Eigen/Dense>

namespace ringform {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A pointing direction on the unit 2-sphere. Construction normalizes the
/// input; zero or non-finite vectors are rejected with DomainError.
class ReducedAttitude {
 public:
  ReducedAttitude() : v_(1.0, 0.0, 0.0) {}
  explicit ReducedAttitude(const Vec3& v);
  ReducedAttitude(double x, double y, double z) : ReducedAttitude(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

  ReducedAttitude operator-() const { return ReducedAttitude(-v_, Unchecked{}); }

 private:
  struct Unchecked {};
  ReducedAttitude(const Vec3& v, Unchecked) : v_(v) {}
  Vec3 v_;
};

/// Longitude/latitude parametrization: psi in [-pi, pi), phi in [-pi/2, pi/2].
struct SphereAngles {
  double psi = 0.0;
  double phi = 0.0;
};

/// Rotation taking one attitude to another. `degenerate` marks the
/// coincident/antipodal case where the axis is a conventional choice.
struct AxisAngle {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
  bool degenerate = false;
};

/// Skew-symmetric matrix with hat(v) * w == v.cross(w).
Mat3 hat(const Vec3& v);

/// Length of the shorter great-circle arc, in [0, pi].
double geodesic_distance(const ReducedAttitude& a, const ReducedAttitude& b);
double geodesic_distance(const Vec3& a, const Vec3& b);

/// Unit axis orthogonal to `a`: normalize(a x e_k) for the basis vector e_k
/// least aligned with `a` (lowest index on ties).
Vec3 degenerate_axis(const Vec3& a);

/// Axis k and angle theta with b = exp(theta * hat(k)) a.
AxisAngle relative_axis_angle(const ReducedAttitude& a, const ReducedAttitude& b);

/// Rodrigues rotation of p about a unit axis. The attitude overload
/// renormalizes the result.
Vec3 rotate(const Vec3& p, const Vec3& axis, double angle);
ReducedAttitude rotate(const ReducedAttitude& p, const Vec3& axis, double angle);

ReducedAttitude angles_to_vec(const SphereAngles& s);
/// At the poles psi is reported as 0.
SphereAngles vec_to_angles(const ReducedAttitude& p);

/// True when the three points lie on one great circle, judged by the three
/// geodesic-distance identities within `tol` radians.
bool great_circle_test(const ReducedAttitude& a, const ReducedAttitude& b,
                       const ReducedAttitude& c, double tol);

}  // namespace ringform
