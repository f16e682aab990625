#include "gsq/jacobian_check.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gsq/rng.h"
#include "gsq/spherical_geometry.h"

namespace gsq {

JacobianCheckReport CheckJacobians(int samples, std::uint64_t seed, double tolerance,
                                   double step) {
  JacobianCheckReport report;
  report.samples = samples;
  report.tolerance = tolerance;
  report.step = step;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    LocalFrame frame;
    const double offset = rng.Uniform(0.05, 1.0);
    frame.p0 = offset * rng.UnitVector();
    frame.focal = rng.LogUniform(0.5, 2000.0);
    SphericalCoord s;
    // rho >= 3 |p0| keeps epsilon <= 1/2.
    s.rho = rng.LogUniform(3.0 * offset, 1000.0 * offset);
    s.theta = std::acos(1.0 - 2.0 * rng.Uniform());
    s.phi = rng.Uniform(-kPi, kPi);

    const ProjectionJacobian exact = JacobianExact(frame, s);
    const ProjectionJacobian fd = FiniteDiffJacobian(frame, s, step);
    const double norm_p = LocalPoint(frame, s).norm();
    const double angular_scale = frame.focal * s.rho / norm_p;
    const double radial_scale = frame.focal * frame.p0.norm() / (norm_p * norm_p);
    auto rel = [](const Vec3& a, const Vec3& b, double scale) {
      return (a - b).norm() / std::max(b.norm(), scale);
    };
    const double err = std::max({rel(fd.dp_dtheta, exact.dp_dtheta, angular_scale),
                                 rel(fd.dp_dphi, exact.dp_dphi, angular_scale),
                                 rel(fd.dp_drho, exact.dp_drho, radial_scale)});
    report.max_epsilon = std::max(report.max_epsilon, exact.epsilon);
    if (err > report.max_relative_error || report.worst_sample < 0) {
      report.max_relative_error = std::max(report.max_relative_error, err);
      report.worst_sample = i;
    }
  }
  report.passed = report.max_relative_error < tolerance && report.max_epsilon < 0.5;
  return report;
}

std::string FormatJacobianReport(const JacobianCheckReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "samples: %d\nstep: %.3g\nmax epsilon: %.6f\nmax relative error: %.3e "
                "(sample %d)\ntolerance: %.1e\nresult: %s\n",
                r.samples, r.step, r.max_epsilon, r.max_relative_error, r.worst_sample,
                r.tolerance, r.passed ? "PASS" : "FAIL");
  return buf;
}

}  // namespace gsq
