#include <cmath>

#include <gtest/gtest.h>

#include "gsq/errors.h"
#include "gsq/metrics.h"
#include "gsq/rng.h"
#include "gsq/spherical_geometry.h"

namespace gsq {
namespace {

void ExpectNear(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_LE((a - b).norm(), tol) << "got " << a.transpose() << " want " << b.transpose();
}

TEST(Direction, KnownAngles) {
  EXPECT_EQ(Direction(0.0, 1.234), Vec3(0, 0, 1));
  ExpectNear(Direction(kPi / 2, 0), Vec3(1, 0, 0), 1e-15);
  ExpectNear(Direction(kPi / 2, kPi / 2), Vec3(0, 1, 0), 1e-15);
}

TEST(ToSpherical, Examples) {
  auto s = ToSpherical(Vec3(0, 0, 1), Vec3::Zero());
  EXPECT_DOUBLE_EQ(s.rho, 1);
  EXPECT_DOUBLE_EQ(s.theta, 0);
  EXPECT_DOUBLE_EQ(s.phi, 0);

  s = ToSpherical(Vec3(3, 0, 4), Vec3::Zero());
  EXPECT_DOUBLE_EQ(s.rho, 5);
  EXPECT_DOUBLE_EQ(s.theta, std::atan2(3.0, 4.0));
  EXPECT_DOUBLE_EQ(s.phi, 0);

  s = ToSpherical(Vec3(0, 2, 0), Vec3(0, 1, 0));
  EXPECT_DOUBLE_EQ(s.rho, 1);
  EXPECT_DOUBLE_EQ(s.theta, kPi / 2);
  EXPECT_DOUBLE_EQ(s.phi, kPi / 2);

  EXPECT_THROW(ToSpherical(Vec3(1, 1, 1), Vec3(1, 1, 1)), DegenerateInputError);
}

TEST(ToSpherical, RangesAndRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 origin(rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(-2, 2));
    const Vec3 p = origin + rng.LogUniform(1e-3, 1e3) * rng.UnitVector();
    const auto s = ToSpherical(p, origin);
    EXPECT_GE(s.theta, 0.0);
    EXPECT_LE(s.theta, kPi);
    EXPECT_GE(s.phi, -kPi);
    EXPECT_LT(s.phi, kPi);
    EXPECT_LE((FromSpherical(s, origin) - p).norm(), 1e-12 * std::max(1.0, p.norm()));
  }
  // -x axis lands on phi = -pi, not +pi.
  EXPECT_DOUBLE_EQ(ToSpherical(Vec3(-1, 0, 0), Vec3::Zero()).phi, -kPi);
}

TEST(SphereProject, Examples) {
  EXPECT_EQ(SphereProject(Vec3(0, 0, 2), 1), Vec3(0, 0, 1));
  ExpectNear(SphereProject(Vec3(3, 4, 0), 10), Vec3(6, 8, 0), 1e-14);
  EXPECT_THROW(SphereProject(Vec3::Zero(), 1), DegenerateInputError);
}

TEST(JacobianExact, ZeroOffset) {
  const LocalFrame frame{Vec3::Zero(), 1.0};
  const SphericalCoord s{1.0, 0.7, -1.9};
  const auto j = JacobianExact(frame, s);
  EXPECT_EQ(j.dp_drho, Vec3::Zero());
  ExpectNear(j.dp_dtheta,
             Vec3(std::cos(0.7) * std::cos(-1.9), std::cos(0.7) * std::sin(-1.9), -std::sin(0.7)),
             1e-15);
  EXPECT_EQ(j.epsilon, 0.0);
}

TEST(JacobianExact, MatchesSymbolicReference) {
  // Values from tests/oracles/jacobian_oracle.py.
  const LocalFrame frame{Vec3(0.3, -0.2, 0.4), 1.0};
  const SphericalCoord s{50.0, 1.0, 0.3};
  const auto j = JacobianExact(frame, s);
  ExpectNear(j.dp_dtheta, Vec3(5.153621837213612e-01, 1.593957837377536e-01, -8.323606241230771e-01),
             1e-14);
  ExpectNear(j.dp_dphi, Vec3(-2.429345056676845e-01, 7.984929531735232e-01, 2.518890869233312e-03),
             1e-14);
  ExpectNear(j.dp_drho, Vec3(1.164958760631254e-05, 1.188293449767357e-04, -7.023321886948097e-05),
             1e-17);

  const auto fd = FiniteDiffJacobian(frame, s, 1e-5);
  EXPECT_LE((fd.dp_dtheta - j.dp_dtheta).norm() / j.dp_dtheta.norm(), 1e-6);
  EXPECT_LE((fd.dp_dphi - j.dp_dphi).norm() / j.dp_dphi.norm(), 1e-6);
  EXPECT_LE((fd.dp_drho - j.dp_drho).norm() / j.dp_drho.norm(), 1e-6);
}

TEST(JacobianExact, AgreesWithFiniteDifferencesAtSmallEpsilon) {
  Rng rng(2024);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p0 = rng.UnitVector() * rng.Uniform(0.05, 1.0);
    // |P| >= rho - |p0| >= 10.5 |p0| keeps epsilon < 0.1.
    const SphericalCoord s{rng.LogUniform(11.5 * p0.norm(), 1000 * p0.norm()),
                           std::acos(rng.Uniform(-1, 1)), rng.Uniform(-kPi, kPi)};
    const LocalFrame frame{p0, rng.LogUniform(0.5, 2000)};
    const auto j = JacobianExact(frame, s);
    ASSERT_LT(j.epsilon, 0.1);
    const auto fd = FiniteDiffJacobian(frame, s, 1e-5);
    const double P = LocalPoint(frame, s).norm();
    const double angular_scale = frame.focal * s.rho / P;
    const double radial_scale = frame.focal * p0.norm() / (P * P);
    worst = std::max(worst, (fd.dp_dtheta - j.dp_dtheta).norm() /
                                std::max(j.dp_dtheta.norm(), angular_scale));
    worst = std::max(worst, (fd.dp_dphi - j.dp_dphi).norm() /
                                std::max(j.dp_dphi.norm(), angular_scale));
    worst = std::max(worst, (fd.dp_drho - j.dp_drho).norm() /
                                std::max(j.dp_drho.norm(), radial_scale));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(FiniteDiffJacobian, SecondOrderConvergence) {
  const LocalFrame frame{Vec3(0.4, 0.1, -0.3), 2.0};
  const SphericalCoord s{3.0, 1.1, 2.0};
  const auto j = JacobianExact(frame, s);
  const auto coarse = FiniteDiffJacobian(frame, s, 1e-2);
  const auto fine = FiniteDiffJacobian(frame, s, 5e-3);
  const double ratio_theta =
      (coarse.dp_dtheta - j.dp_dtheta).norm() / (fine.dp_dtheta - j.dp_dtheta).norm();
  const double ratio_rho = (coarse.dp_drho - j.dp_drho).norm() / (fine.dp_drho - j.dp_drho).norm();
  EXPECT_NEAR(ratio_theta, 4.0, 0.2);
  EXPECT_NEAR(ratio_rho, 4.0, 0.2);
}

TEST(FiniteDiffJacobian, PoleFamily) {
  // Points on the z axis: dtheta moves along +x at phi = 0.
  const LocalFrame frame{Vec3::Zero(), 1.0};
  const auto fd = FiniteDiffJacobian(frame, SphericalCoord{5.0, 0.0, 0.0}, 1e-5);
  ExpectNear(fd.dp_dtheta, Vec3(1, 0, 0), 1e-9);
}

TEST(JacobianLeading, EqualsExactAtZeroOffset) {
  const LocalFrame frame{Vec3::Zero(), 3.0};
  const SphericalCoord s{7.0, 0.4, 1.2};
  const auto a = JacobianLeading(frame, s);
  const auto b = JacobianExact(frame, s);
  ExpectNear(a.dp_dtheta, b.dp_dtheta, 1e-15);
  ExpectNear(a.dp_dphi, b.dp_dphi, 1e-15);
  EXPECT_EQ(a.dp_drho, Vec3::Zero());
}

TEST(JacobianLeading, InverseSquare) {
  const LocalFrame frame{Vec3(0.2, 0.5, -0.1), 1.0};
  const SphericalCoord near{20.0, 0.9, -0.4};
  SphericalCoord far = near;
  far.rho *= 10;
  const double ratio =
      JacobianLeading(frame, near).dp_drho.norm() / JacobianLeading(frame, far).dp_drho.norm();
  EXPECT_NEAR(ratio, 100.0, 1.0);
  const double exact_ratio =
      JacobianExact(frame, near).dp_drho.norm() / JacobianExact(frame, far).dp_drho.norm();
  EXPECT_NEAR(exact_ratio, 100.0, 1.0);
}

TEST(JacobianLeading, RadialRowOrthogonalToDirection) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const LocalFrame frame{rng.UnitVector() * rng.Uniform(), 1.0};
    const SphericalCoord s{rng.Uniform(2, 100), std::acos(rng.Uniform(-1, 1)), rng.Uniform(-kPi, kPi)};
    const Vec3 d = Direction(s.theta, s.phi);
    EXPECT_NEAR(JacobianLeading(frame, s).dp_drho.dot(d), 0.0, 1e-15);
  }
}

TEST(JacobianLeading, RelativeErrorIsOrderEpsilon) {
  const LocalFrame frame{Vec3(0.3, -0.2, 0.4), 1.0};
  for (double rho : {10.0, 100.0, 1000.0}) {
    const SphericalCoord s{rho, 1.0, 0.3};
    const auto exact = JacobianExact(frame, s);
    const auto lead = JacobianLeading(frame, s);
    EXPECT_LE((lead.dp_drho - exact.dp_drho).norm() / exact.dp_drho.norm(), 3 * exact.epsilon);
    EXPECT_LE((lead.dp_dtheta - exact.dp_dtheta).norm() / exact.dp_dtheta.norm(),
              3 * exact.epsilon);
  }
}

TEST(DpDt, Examples) {
  EXPECT_EQ(DpDt(LocalFrame{Vec3::Zero(), 4.0}, SphericalCoord{3.0, 0.2, 0.1}), Vec3::Zero());
  // p0 perpendicular to d: f * (p0 - 0) with the chain-rule sign.
  ExpectNear(DpDt(LocalFrame{Vec3(1, 0, 0), 2.0}, SphericalCoord{5.0, 0.0, 0.0}), Vec3(2, 0, 0),
             1e-15);
}

TEST(DpDt, LeadingTermOfExactDerivative) {
  // Exact d/dt from tests/oracles/jacobian_oracle.py.
  const LocalFrame frame{Vec3(0.3, -0.2, 0.4), 1.0};
  const struct {
    double rho;
    Vec3 exact;
  } cases[] = {
      {10, Vec3(-3.428207036136445e-02, -2.804596270151866e-01, 1.597797869539282e-01)},
      {100, Vec3(-2.838651363388093e-02, -2.992043727443027e-01, 1.776769626926826e-01)},
      {1000, Vec3(-2.770388414401662e-02, -3.011321182670540e-01, 1.795848315980949e-01)},
  };
  const double p0 = frame.p0.norm();
  for (const auto& c : cases) {
    const SphericalCoord s{c.rho, 1.0, 0.3};
    ExpectNear(DpDtExact(frame, s), c.exact, 1e-13);
    const double eps = p0 / LocalPoint(frame, s).norm();
    // First-order remainder: the leading form is exact up to O(eps) f|p0|.
    EXPECT_LE((DpDt(frame, s) - c.exact).norm(), 3 * eps * frame.focal * p0);
  }
}

TEST(DpDt, FlatInDistance) {
  const LocalFrame frame{Vec3(0.25, 0.1, -0.3), 1.0};
  std::vector<double> rho, mag;
  for (double r = 20; r <= 2000; r *= 1.5) {
    rho.push_back(r);
    mag.push_back(DpDtExact(frame, SphericalCoord{r, 2.0, -1.0}).norm());
  }
  EXPECT_NEAR(LogLogSlope(rho, mag), 0.0, 0.01);
}

}  // namespace
}  // namespace gsq
