#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "gsq/errors.h"
#include "gsq/quantization.h"
#include "gsq/rng.h"
#include "gsq/spherical_geometry.h"
#include "test_util.h"

namespace gsq {
namespace {

CameraRig Rig(std::vector<Vec3> centers) {
  CameraRig rig;
  for (const auto& c : centers) rig.cameras.push_back(RigCamera{c, std::nullopt});
  rig.focal_px = 100;
  rig.width = 64;
  rig.height = 48;
  return rig;
}

GaussianModel ModelAt(const std::vector<Vec3>& positions) {
  GaussianModel m;
  for (const auto& p : positions) {
    Gaussian g;
    g.position = p;
    g.opacity_logit = 0.25f;
    m.gaussians.push_back(g);
  }
  return m;
}

TEST(DeriveGeometry, Examples) {
  auto g = DeriveGeometry(Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)}), 1.5);
  EXPECT_EQ(g.origin, Vec3::Zero());
  EXPECT_DOUBLE_EQ(g.r_inner, 1.0);
  EXPECT_DOUBLE_EQ(g.r_center, 1.5);

  g = DeriveGeometry(Rig({Vec3(0, 0, 0), Vec3(0, 0, 2)}), 2.0);
  EXPECT_EQ(g.origin, Vec3(0, 0, 1));
  EXPECT_DOUBLE_EQ(g.r_inner, 1.0);
  EXPECT_DOUBLE_EQ(g.r_center, 2.0);

  EXPECT_THROW(DeriveGeometry(Rig({Vec3(3, 3, 3)})), DegenerateInputError);
  const auto explicit_r = GeometryWithCenterRadius(Rig({Vec3(3, 3, 3)}), 2.0);
  EXPECT_EQ(explicit_r.origin, Vec3(3, 3, 3));
  EXPECT_DOUBLE_EQ(explicit_r.r_center, 2.0);
}

TEST(Classify, StrictBoundary) {
  RigGeometry g;
  g.r_center = 2.0;
  EXPECT_EQ(Classify(Vec3(1, 0, 0), g), Region::kCenter);
  EXPECT_EQ(Classify(Vec3(0, 2, 0), g), Region::kPeriphery);
  EXPECT_EQ(Classify(Vec3(0, 0, 200), g), Region::kPeriphery);
}

TEST(ScalarQuantizer, BinCenters) {
  EXPECT_EQ(QuantizeScalar(0.3, 0, 1, 1), 0u);
  EXPECT_DOUBLE_EQ(DequantizeScalar(0, 0, 1, 1), 0.25);
  EXPECT_EQ(QuantizeScalar(1.0, 0, 1, 8), 255u);
  EXPECT_EQ(QuantizeScalar(7.0, 0, 1, 8), 255u);
  EXPECT_EQ(QuantizeScalar(-7.0, 0, 1, 8), 0u);
  EXPECT_THROW(QuantizeScalar(0.5, 1, 1, 8), std::invalid_argument);
  EXPECT_THROW(QuantizeScalar(0.5, 0, 1, 0), std::invalid_argument);
}

TEST(ScalarQuantizer, HalfStepBound) {
  Rng rng(11);
  const double bound = 10.0 / 4096 / 2;
  double worst = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.Uniform(-5, 5);
    worst = std::max(worst, std::abs(DequantizeScalar(QuantizeScalar(x, -5, 5, 12), -5, 5, 12) - x));
  }
  EXPECT_LE(worst, bound * (1 + 1e-12));
}

TEST(ScalarQuantizer, MonotoneAndFixedPoints) {
  std::uint32_t prev = 0;
  for (int i = 0; i <= 1000; ++i) {
    const std::uint32_t c = QuantizeScalar(-1 + 3.0 * i / 1000, -1, 2, 6);
    EXPECT_GE(c, prev);
    prev = c;
  }
  for (std::uint32_t c = 0; c < 64; ++c) EXPECT_EQ(QuantizeScalar(DequantizeScalar(c, -1, 2, 6), -1, 2, 6), c);
}

TEST(SchemeNames, RoundTrip) {
  for (Scheme s : {Scheme::kUniformXYZ, Scheme::kSpherical3DoFPlus, Scheme::kSphericalNoSplit,
                   Scheme::kCartesianSplit}) {
    EXPECT_EQ(ParseSchemeName(SchemeName(s)), s);
  }
  EXPECT_EQ(SchemeName(Scheme::kSpherical3DoFPlus), "ours");
  EXPECT_FALSE(ParseSchemeName("polar").has_value());
}

TEST(QuantizeModel, AllCenterMatchesCartesianSplit) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto geometry = DeriveGeometry(rig);
  const auto model = ModelAt({Vec3(0.1, 0.2, 0.3), Vec3(-1.2, 0.4, 0.0), Vec3(0.0, -0.7, 1.1)});
  const auto ours = QuantizeModel(model, geometry, {Scheme::kSpherical3DoFPlus, 10});
  const auto cart = QuantizeModel(model, geometry, {Scheme::kCartesianSplit, 10});
  EXPECT_EQ(ours.header.n_center, 3u);
  EXPECT_EQ(ours.codes, cart.codes);
  const auto a = DequantizeModel(ours);
  const auto b = DequantizeModel(cart);
  for (std::size_t i = 0; i < model.size(); ++i) EXPECT_EQ(a.gaussians[i].position, b.gaussians[i].position);
}

TEST(QuantizeModel, SinglePeripheryGaussianWithinHalfStep) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto geometry = DeriveGeometry(rig);
  const double rho_max = 100;
  const auto model = ModelAt({Vec3(0.2, 0.0, 0.1), Vec3(0, 0, rho_max)});
  const auto q = QuantizeModel(model, geometry, {Scheme::kSpherical3DoFPlus, 16});
  EXPECT_EQ(q.header.n_center, 1u);
  EXPECT_DOUBLE_EQ(q.header.rho_max, rho_max);
  const auto back = DequantizeModel(q);

  const Vec3 p = back.gaussians[1].position;
  const auto s = ToSpherical(p, geometry.origin);
  const double dt = (1 / geometry.r_center - 1 / rho_max) / 65536;
  EXPECT_LE(std::abs(1 / s.rho - 1 / rho_max), dt / 2 * (1 + 1e-9));
  EXPECT_LE(s.theta, kPi / 65536 / 2 * (1 + 1e-9));
  const double radial_bound = rho_max * rho_max * dt / 2;
  EXPECT_LE(std::abs(s.rho - rho_max), radial_bound * (1 + rho_max * dt));
}

TEST(QuantizeModel, ChannelHalfStepBound) {
  const auto& scene = testing::GardenDesk();
  const auto geometry = DeriveGeometry(scene.rig);
  for (Scheme scheme : {Scheme::kUniformXYZ, Scheme::kSpherical3DoFPlus, Scheme::kSphericalNoSplit,
                        Scheme::kCartesianSplit}) {
    const auto q = QuantizeModel(scene.model, geometry, {scheme, 12});
    const auto back = DequantizeModel(q);
    for (std::size_t k = 0; k < q.permutation.size(); ++k) {
      const std::size_t i = q.permutation[k];
      const Region region = k < q.header.n_center ? Region::kCenter : Region::kPeriphery;
      const auto ranges = ChannelRanges(q.header, region);
      const auto a = ToChannels(scene.model.gaussians[i].position, q.header, region);
      const auto b = ToChannels(back.gaussians[i].position, q.header, region);
      for (int c = 0; c < 3; ++c) {
        const double half = (ranges[c].hi - ranges[c].lo) / 4096 / 2;
        double err = std::abs(a[c] - b[c]);
        if (region == Region::kPeriphery && c == 1) err = std::min(err, 2 * kPi - err);
        // Near the poles phi is ill-conditioned after the round trip.
        if (region == Region::kPeriphery && c == 1 && std::sin(a[0]) < 1e-3) continue;
        ASSERT_LE(err, half * (1 + 1e-6) + 1e-12) << SchemeName(scheme) << " gaussian " << i;
      }
    }
  }
}

TEST(QuantizeModel, RequantizeIsIdempotent) {
  const auto& scene = testing::GardenDesk();
  const auto geometry = DeriveGeometry(scene.rig);
  for (Scheme scheme : {Scheme::kUniformXYZ, Scheme::kSpherical3DoFPlus, Scheme::kSphericalNoSplit,
                        Scheme::kCartesianSplit}) {
    SCOPED_TRACE(SchemeName(scheme));
    const auto q = QuantizeModel(scene.model, geometry, {scheme, 12});
    const auto again = RequantizeModel(DequantizeModel(q), q);
    EXPECT_EQ(again.codes, q.codes);
  }
}

TEST(QuantizeModel, PassthroughAttributesUntouched) {
  const auto model = ReadModel(testing::DataDir() / "corpus_sh1_extra.ply");
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto q = QuantizeModel(model, DeriveGeometry(rig), {Scheme::kSpherical3DoFPlus, 14});
  const auto back = DequantizeModel(q);
  ASSERT_EQ(back.size(), model.size());
  EXPECT_EQ(back.layout, model.layout);
  for (std::size_t i = 0; i < model.size(); ++i) {
    std::vector<std::uint8_t> a(RecordSize(model.layout, true)), b(a.size());
    EncodeRecord(model.gaussians[i], model.layout, true, a.data());
    EncodeRecord(back.gaussians[i], back.layout, true, b.data());
    ASSERT_EQ(a, b) << "gaussian " << i;
  }
}

TEST(QuantizeModel, EdgePartitions) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto geometry = DeriveGeometry(rig);
  const auto inner = ModelAt({Vec3(0.1, 0, 0), Vec3(0, 0.3, 0)});
  const auto outer = ModelAt({Vec3(10, 0, 0), Vec3(0, -30, 2)});
  const auto qi = QuantizeModel(inner, geometry, {Scheme::kSpherical3DoFPlus, 12});
  const auto qo = QuantizeModel(outer, geometry, {Scheme::kSpherical3DoFPlus, 12});
  EXPECT_EQ(qi.header.n_center, qi.header.n_total);
  EXPECT_EQ(qo.header.n_center, 0u);
  const auto bi = DequantizeModel(ParseQuantized(SerializeQuantized(qi)));
  const auto bo = DequantizeModel(ParseQuantized(SerializeQuantized(qo)));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE((bi.gaussians[i].position - inner.gaussians[i].position).norm(), 1e-2);
    EXPECT_LE((bo.gaussians[i].position - outer.gaussians[i].position).norm(),
              outer.gaussians[i].position.norm() * 1e-2);
  }
}

TEST(QuantizeModel, SplitGroupsCenterFirst) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto model = ModelAt({Vec3(10, 0, 0), Vec3(0.1, 0, 0), Vec3(0, 20, 0), Vec3(0, 0, 0.5)});
  const auto q = QuantizeModel(model, DeriveGeometry(rig), {Scheme::kSpherical3DoFPlus, 12});
  EXPECT_EQ(q.header.n_center, 2u);
  EXPECT_EQ(q.permutation, (std::vector<std::uint32_t>{1, 3, 0, 2}));
  const auto uniform = QuantizeModel(model, DeriveGeometry(rig), {Scheme::kUniformXYZ, 12});
  EXPECT_EQ(uniform.permutation, (std::vector<std::uint32_t>{0, 1, 2, 3}));
}

TEST(QuantizeModel, DegenerateRigWithExplicitRadius) {
  const auto rig = Rig({Vec3(0, 0, 0)});
  const auto model = ModelAt({Vec3(0.5, 0, 0), Vec3(0, 50, 0)});
  EXPECT_THROW(DeriveGeometry(rig), DegenerateInputError);
  const auto q = QuantizeModel(model, GeometryWithCenterRadius(rig, 1.0), {Scheme::kSpherical3DoFPlus, 16});
  EXPECT_EQ(q.header.n_center, 1u);
  const auto back = DequantizeModel(q);
  EXPECT_LE((back.gaussians[1].position - Vec3(0, 50, 0)).norm(), 0.05);
}

TEST(QuantizeModel, RejectsBadBitDepth) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto model = ModelAt({Vec3(1, 1, 1)});
  EXPECT_THROW(QuantizeModel(model, DeriveGeometry(rig), {Scheme::kUniformXYZ, 0}), std::invalid_argument);
  EXPECT_THROW(QuantizeModel(model, DeriveGeometry(rig), {Scheme::kUniformXYZ, 25}), std::invalid_argument);
}

TEST(RateReport, Overheads) {
  const auto flag = ComputeRateReport(Scheme::kSpherical3DoFPlus, 12, 12345, OverheadMode::kPerGaussianFlag);
  EXPECT_DOUBLE_EQ(flag.overhead_bits_per_coord, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(flag.total_bits_per_coord, 12 + 1.0 / 3.0);

  const std::uint64_t n = 1u << 20;
  const auto split = ComputeRateReport(Scheme::kSpherical3DoFPlus, 16, n, OverheadMode::kSplitIndex);
  EXPECT_DOUBLE_EQ(split.overhead_bits_per_coord, 21.0 / (3.0 * n));

  for (auto mode : {OverheadMode::kSplitIndex, OverheadMode::kPerGaussianFlag}) {
    EXPECT_EQ(ComputeRateReport(Scheme::kUniformXYZ, 16, n, mode).overhead_bits_per_coord, 0.0);
  }
  EXPECT_LT(ComputeRateReport(Scheme::kCartesianSplit, 16, 10000, OverheadMode::kSplitIndex)
                .overhead_bits_per_coord,
            0.001);
}

TEST(Container, RoundTrip) {
  const auto model = ReadModel(testing::DataDir() / "corpus_sh3.ply");
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  for (auto mode : {OverheadMode::kSplitIndex, OverheadMode::kPerGaussianFlag}) {
    const auto q = QuantizeModel(model, DeriveGeometry(rig), {Scheme::kSpherical3DoFPlus, 13}, mode);
    const auto bytes = SerializeQuantized(q);
    const auto parsed = ParseQuantized(bytes);
    EXPECT_EQ(parsed.codes, q.codes);
    EXPECT_EQ(parsed.passthrough, q.passthrough);
    EXPECT_EQ(parsed.permutation, q.permutation);
    EXPECT_EQ(parsed.header.overhead_mode, mode);
    EXPECT_EQ(SerializeQuantized(parsed), bytes);
    // 3 * 13 bits per gaussian, byte aligned.
    EXPECT_EQ(q.codes.size(), (3 * 13 * model.size() + 7) / 8);
  }
}

TEST(Container, RejectsCorruptInput) {
  const auto rig = Rig({Vec3(1, 0, 0), Vec3(-1, 0, 0)});
  const auto q = QuantizeModel(ModelAt({Vec3(3, 0, 0), Vec3(0, 0.5, 0)}), DeriveGeometry(rig),
                               {Scheme::kSpherical3DoFPlus, 8});
  auto bytes = SerializeQuantized(q);
  EXPECT_THROW(ParseQuantized(std::span(bytes).first(bytes.size() - 3)), DecodeError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(ParseQuantized(bad_magic), DecodeError);
  auto bad_perm = q;
  bad_perm.permutation = {0, 0};
  EXPECT_THROW(DequantizeModel(bad_perm), DecodeError);
}

}  // namespace
}  // namespace gsq
