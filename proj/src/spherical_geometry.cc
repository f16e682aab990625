#include "gsq/spherical_geometry.h"

#include <cmath>

#include "gsq/errors.h"

namespace gsq {

Vec3 Direction(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Vec3 DirectionDTheta(double theta, double phi) {
  const double ct = std::cos(theta);
  return {ct * std::cos(phi), ct * std::sin(phi), -std::sin(theta)};
}

Vec3 DirectionDPhi(double theta, double phi) {
  const double st = std::sin(theta);
  return {-st * std::sin(phi), st * std::cos(phi), 0.0};
}

SphericalCoord ToSpherical(const Vec3& p, const Vec3& origin) {
  const Vec3 v = p - origin;
  const double rho = v.norm();
  if (!(rho > 0.0)) throw DegenerateInputError("spherical coordinates of the origin are undefined");
  const double planar = std::hypot(v.x(), v.y());
  SphericalCoord s;
  s.rho = rho;
  s.theta = std::atan2(planar, v.z());
  if (planar > 0.0) {
    s.phi = std::atan2(v.y(), v.x());
    if (s.phi >= kPi) s.phi = -kPi;
  } else {
    s.phi = 0.0;
  }
  return s;
}

Vec3 FromSpherical(const SphericalCoord& s, const Vec3& origin) {
  return origin + s.rho * Direction(s.theta, s.phi);
}

Vec3 SphereProject(const Vec3& point, double focal) {
  const double norm = point.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("cannot project the zero vector onto the sphere");
  return focal * point / norm;
}

Vec3 LocalPoint(const LocalFrame& frame, const SphericalCoord& s) {
  return frame.p0 + s.rho * Direction(s.theta, s.phi);
}

ProjectionJacobian JacobianExact(const LocalFrame& frame, const SphericalCoord& s) {
  const Vec3 point = LocalPoint(frame, s);
  const double norm = point.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("projected point coincides with the camera");
  // d(P/|P|)/dP = I/|P| - P P^T / |P|^3
  const Mat3 projector =
      Mat3::Identity() / norm - point * point.transpose() / (norm * norm * norm);
  ProjectionJacobian j;
  j.dp_dtheta = frame.focal * s.rho * (projector * DirectionDTheta(s.theta, s.phi));
  j.dp_dphi = frame.focal * s.rho * (projector * DirectionDPhi(s.theta, s.phi));
  if (s.rho > 0.0) {
    // d - u (u.d) with u = P/|P| equals -(p0 - u (u.p0)) / rho; this form is
    // exactly zero for p0 = 0 and avoids cancellation far from the camera.
    const Vec3 u = point / norm;
    j.dp_drho = -frame.focal / (s.rho * norm) * (frame.p0 - u * u.dot(frame.p0));
  } else {
    j.dp_drho = frame.focal * (projector * Direction(s.theta, s.phi));
  }
  j.epsilon = frame.p0.norm() / norm;
  return j;
}

ProjectionJacobian JacobianLeading(const LocalFrame& frame, const SphericalCoord& s) {
  if (!(s.rho > 0.0)) throw DegenerateInputError("rho must be positive");
  const Vec3 point = LocalPoint(frame, s);
  const double norm = point.norm();
  if (!(norm > 0.0)) throw DegenerateInputError("projected point coincides with the camera");
  const Vec3 d = Direction(s.theta, s.phi);
  const double scale = frame.focal * s.rho / norm;
  ProjectionJacobian j;
  j.dp_dtheta = scale * DirectionDTheta(s.theta, s.phi);
  j.dp_dphi = scale * DirectionDPhi(s.theta, s.phi);
  j.dp_drho = frame.focal / (s.rho * s.rho) * (frame.p0.dot(d) * d - frame.p0);
  j.epsilon = frame.p0.norm() / norm;
  return j;
}

Vec3 DpDt(const LocalFrame& frame, const SphericalCoord& s) {
  if (!(s.rho > 0.0)) throw DegenerateInputError("rho must be positive");
  const Vec3 d = Direction(s.theta, s.phi);
  return frame.focal * (frame.p0 - frame.p0.dot(d) * d);
}

Vec3 DpDtExact(const LocalFrame& frame, const SphericalCoord& s) {
  return -s.rho * s.rho * JacobianExact(frame, s).dp_drho;
}

ProjectionJacobian FiniteDiffJacobian(const LocalFrame& frame, const SphericalCoord& s,
                                      double step) {
  auto project = [&](double rho, double theta, double phi) {
    return SphereProject(frame.p0 + rho * Direction(theta, phi), frame.focal);
  };
  const double h_angle = step;
  const double h_rho = step * std::max(1.0, s.rho);
  ProjectionJacobian j;
  j.dp_dtheta = (project(s.rho, s.theta + h_angle, s.phi) -
                 project(s.rho, s.theta - h_angle, s.phi)) / (2.0 * h_angle);
  j.dp_dphi = (project(s.rho, s.theta, s.phi + h_angle) -
               project(s.rho, s.theta, s.phi - h_angle)) / (2.0 * h_angle);
  j.dp_drho = (project(s.rho + h_rho, s.theta, s.phi) -
               project(s.rho - h_rho, s.theta, s.phi)) / (2.0 * h_rho);
  j.epsilon = frame.p0.norm() / LocalPoint(frame, s).norm();
  return j;
}

}  // namespace gsq
