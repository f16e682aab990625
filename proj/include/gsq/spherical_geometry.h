#ifndef GSQ_SPHERICAL_GEOMETRY_H_
#define GSQ_SPHERICAL_GEOMETRY_H_

#include <numbers>

#include "gsq/model_io.h"

namespace gsq {

inline constexpr double kPi = std::numbers::pi;

// Position relative to an origin: rho > 0, theta in [0, pi] from +z,
// phi in [-pi, pi) from +x. At the poles phi is 0.
struct SphericalCoord {
  double rho = 1.0;
  double theta = 0.0;
  double phi = 0.0;
};

// Camera-centred referential sharing the world orientation. `p0` is the
// world origin seen from the camera; `focal` is the radius of the
// projection sphere.
struct LocalFrame {
  Vec3 p0 = Vec3::Zero();
  double focal = 1.0;
};

// Derivatives of the sphere projection f * P / |P| with respect to the
// spherical coordinates of P - p0.
struct ProjectionJacobian {
  Vec3 dp_dtheta = Vec3::Zero();
  Vec3 dp_dphi = Vec3::Zero();
  Vec3 dp_drho = Vec3::Zero();
  // |p0| / |P|
  double epsilon = 0.0;
};

// Unit vector (sin t cos p, sin t sin p, cos t).
Vec3 Direction(double theta, double phi);
Vec3 DirectionDTheta(double theta, double phi);
Vec3 DirectionDPhi(double theta, double phi);

// Throws DegenerateInputError when p == origin.
SphericalCoord ToSpherical(const Vec3& p, const Vec3& origin);
Vec3 FromSpherical(const SphericalCoord& s, const Vec3& origin);

// f * P / |P|. Throws DegenerateInputError for the zero vector.
Vec3 SphereProject(const Vec3& point, double focal);

// P = p0 + rho * d(theta, phi), the point in the local referential.
Vec3 LocalPoint(const LocalFrame& frame, const SphericalCoord& s);

// Full chain-rule derivatives, no truncation.
ProjectionJacobian JacobianExact(const LocalFrame& frame, const SphericalCoord& s);

// Far-field forms: angular rows f*rho/|P| * dd, radial row
// f/rho^2 * ((p0.d) d - p0). Differ from the exact values by O(epsilon)
// relative error.
ProjectionJacobian JacobianLeading(const LocalFrame& frame, const SphericalCoord& s);

// Leading term of the derivative with respect to t = 1/rho. Independent of
// rho: f * (p0 - (p0.d) d).
Vec3 DpDt(const LocalFrame& frame, const SphericalCoord& s);

// Exact derivative with respect to t, dp_drho * drho/dt with drho/dt = -rho^2.
Vec3 DpDtExact(const LocalFrame& frame, const SphericalCoord& s);

// Central differences of the projection map. The angular step is `step`
// radians; the radial step is step * max(1, rho).
ProjectionJacobian FiniteDiffJacobian(const LocalFrame& frame, const SphericalCoord& s,
                                      double step);

}  // namespace gsq

#endif  // GSQ_SPHERICAL_GEOMETRY_H_
