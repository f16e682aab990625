#include "gsq/quantization.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gsq/bit_stream.h"
#include "gsq/errors.h"
#include "gsq/spherical_geometry.h"

namespace gsq {
namespace {

// How a region's position is turned into three channels.
enum class Parameterization { kAbsoluteXYZ, kRelativeXYZ, kSpherical };

Parameterization ParameterizationFor(Scheme scheme, Region region) {
  switch (scheme) {
    case Scheme::kUniformXYZ:
      return Parameterization::kAbsoluteXYZ;
    case Scheme::kSpherical3DoFPlus:
      return region == Region::kCenter ? Parameterization::kRelativeXYZ
                                       : Parameterization::kSpherical;
    case Scheme::kSphericalNoSplit:
      return Parameterization::kSpherical;
    case Scheme::kCartesianSplit:
      return region == Region::kCenter ? Parameterization::kRelativeXYZ
                                       : Parameterization::kAbsoluteXYZ;
  }
  return Parameterization::kAbsoluteXYZ;
}

ChannelRange NonDegenerate(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  const double pad = 1e-9 * std::max(1.0, std::abs(lo));
  return {lo - pad, lo + pad};
}

void CheckBits(int bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw std::invalid_argument("bits_per_coord must be in [" + std::to_string(kMinBits) + ", " +
                                std::to_string(kMaxBits) + "], got " + std::to_string(bits));
  }
}

std::uint64_t CodeBytes(std::uint64_t n, int bits) {
  return (3 * static_cast<std::uint64_t>(bits) * n + 7) / 8;
}

// Fills codes and passthrough for the stored order given by header and
// permutation.
void Encode(const GaussianModel& model, QuantizedModel* q) {
  const QuantHeader& h = q->header;
  const auto center_ranges = ChannelRanges(h, Region::kCenter);
  const auto periphery_ranges = ChannelRanges(h, Region::kPeriphery);
  const std::size_t record = RecordSize(model.layout, true);

  BitWriter writer;
  q->passthrough.assign(record * h.n_total, 0);
  for (std::uint64_t i = 0; i < h.n_total; ++i) {
    const Gaussian& g = model.gaussians[q->permutation[i]];
    const Region region = i < h.n_center ? Region::kCenter : Region::kPeriphery;
    const auto& ranges = region == Region::kCenter ? center_ranges : periphery_ranges;
    const auto channels = ToChannels(g.position, h, region);
    for (int c = 0; c < 3; ++c) {
      writer.Write(QuantizeScalar(channels[c], ranges[c].lo, ranges[c].hi, h.bits_per_coord),
                   h.bits_per_coord);
    }
    EncodeRecord(g, model.layout, true, q->passthrough.data() + i * record);
  }
  q->codes = writer.Take();
  q->codes.resize(CodeBytes(h.n_total, h.bits_per_coord), 0);
  q->layout = model.layout;
}

}  // namespace

RigGeometry DeriveGeometry(const CameraRig& rig, double multiplier) {
  if (!(multiplier >= 1.0)) throw std::invalid_argument("radius multiplier must be >= 1");
  RigGeometry g = GeometryWithCenterRadius(rig, 0.0);
  if (!(g.r_inner > 0.0)) {
    throw DegenerateInputError(
        "camera rig has zero extent (single camera or coincident centers); "
        "pass an explicit --r-center");
  }
  g.multiplier = multiplier;
  g.r_center = multiplier * g.r_inner;
  return g;
}

RigGeometry GeometryWithCenterRadius(const CameraRig& rig, double r_center) {
  if (rig.cameras.empty()) throw DegenerateInputError("camera rig has no cameras");
  RigGeometry g;
  for (const auto& cam : rig.cameras) g.origin += cam.center;
  g.origin /= static_cast<double>(rig.cameras.size());
  for (const auto& cam : rig.cameras) g.r_inner = std::max(g.r_inner, (cam.center - g.origin).norm());
  if (r_center != 0.0) {
    if (!(r_center > 0.0) || r_center < g.r_inner) {
      throw std::invalid_argument("r_center must be positive and at least the rig radius");
    }
    g.r_center = r_center;
    g.multiplier = g.r_inner > 0.0 ? r_center / g.r_inner : 0.0;
  }
  return g;
}

Region Classify(const Vec3& position, const RigGeometry& geometry) {
  return (position - geometry.origin).norm() < geometry.r_center ? Region::kCenter
                                                                 : Region::kPeriphery;
}

std::string_view SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kUniformXYZ: return "uniform";
    case Scheme::kSpherical3DoFPlus: return "ours";
    case Scheme::kSphericalNoSplit: return "no-split";
    case Scheme::kCartesianSplit: return "cartesian-split";
  }
  return "unknown";
}

std::optional<Scheme> ParseSchemeName(std::string_view name) {
  for (Scheme s : {Scheme::kUniformXYZ, Scheme::kSpherical3DoFPlus, Scheme::kSphericalNoSplit,
                   Scheme::kCartesianSplit}) {
    if (SchemeName(s) == name) return s;
  }
  return std::nullopt;
}

bool SchemeHasSplit(Scheme scheme) {
  return scheme == Scheme::kSpherical3DoFPlus || scheme == Scheme::kCartesianSplit;
}

std::string_view OverheadModeName(OverheadMode mode) {
  return mode == OverheadMode::kSplitIndex ? "split_index" : "per_gaussian_flag";
}

std::uint32_t QuantizeScalar(double x, double lo, double hi, int bits) {
  if (!(lo < hi)) throw std::invalid_argument("quantizer interval must satisfy lo < hi");
  if (bits < 1 || bits > 31) throw std::invalid_argument("quantizer bit depth out of range");
  const std::uint32_t levels = 1u << bits;
  const double step = (hi - lo) / levels;
  const double clamped = std::clamp(x, lo, hi);
  const double cell = std::floor((clamped - lo) / step);
  if (cell <= 0.0) return 0;
  return static_cast<std::uint32_t>(std::min(cell, static_cast<double>(levels - 1)));
}

double DequantizeScalar(std::uint32_t code, double lo, double hi, int bits) {
  if (!(lo < hi)) throw std::invalid_argument("quantizer interval must satisfy lo < hi");
  if (bits < 1 || bits > 31) throw std::invalid_argument("quantizer bit depth out of range");
  const double step = (hi - lo) / static_cast<double>(1u << bits);
  return lo + (static_cast<double>(code) + 0.5) * step;
}

std::array<ChannelRange, 3> ChannelRanges(const QuantHeader& h, Region region) {
  switch (ParameterizationFor(h.scheme, region)) {
    case Parameterization::kAbsoluteXYZ:
      return {NonDegenerate(h.scene_bounds.lo.x(), h.scene_bounds.hi.x()),
              NonDegenerate(h.scene_bounds.lo.y(), h.scene_bounds.hi.y()),
              NonDegenerate(h.scene_bounds.lo.z(), h.scene_bounds.hi.z())};
    case Parameterization::kRelativeXYZ: {
      const auto r = NonDegenerate(-h.r_center, h.r_center);
      return {r, r, r};
    }
    case Parameterization::kSpherical:
      return {ChannelRange{0.0, kPi}, ChannelRange{-kPi, kPi},
              NonDegenerate(1.0 / h.rho_max, 1.0 / h.r_center)};
  }
  return {};
}

std::array<double, 3> ToChannels(const Vec3& position, const QuantHeader& h, Region region) {
  switch (ParameterizationFor(h.scheme, region)) {
    case Parameterization::kAbsoluteXYZ:
      return {position.x(), position.y(), position.z()};
    case Parameterization::kRelativeXYZ: {
      const Vec3 v = position - h.origin;
      return {v.x(), v.y(), v.z()};
    }
    case Parameterization::kSpherical: {
      if ((position - h.origin).norm() == 0.0) {
        // Direction is undefined; t saturates at the top of its range.
        return {0.0, 0.0, std::numeric_limits<double>::infinity()};
      }
      const SphericalCoord s = ToSpherical(position, h.origin);
      return {s.theta, s.phi, 1.0 / s.rho};
    }
  }
  return {};
}

Vec3 FromChannels(const std::array<double, 3>& channels, const QuantHeader& h, Region region) {
  switch (ParameterizationFor(h.scheme, region)) {
    case Parameterization::kAbsoluteXYZ:
      return {channels[0], channels[1], channels[2]};
    case Parameterization::kRelativeXYZ:
      return h.origin + Vec3(channels[0], channels[1], channels[2]);
    case Parameterization::kSpherical:
      return FromSpherical({1.0 / channels[2], channels[0], channels[1]}, h.origin);
  }
  return Vec3::Zero();
}

QuantizedModel QuantizeModel(const GaussianModel& model, const RigGeometry& geometry,
                             const QuantScheme& scheme, OverheadMode overhead_mode) {
  if (model.gaussians.empty()) throw ValidationError("cannot quantize an empty model");
  CheckBits(scheme.bits_per_coord);
  if (model.gaussians.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("model too large for a 32-bit permutation table");
  }

  QuantizedModel q;
  QuantHeader& h = q.header;
  h.scheme = scheme.kind;
  h.bits_per_coord = scheme.bits_per_coord;
  h.overhead_mode = overhead_mode;
  h.origin = geometry.origin;
  h.n_total = model.size();
  h.scene_bounds.lo = h.scene_bounds.hi = model.gaussians.front().position;
  double rho_min = std::numeric_limits<double>::infinity();
  for (const auto& g : model.gaussians) {
    h.scene_bounds.lo = h.scene_bounds.lo.cwiseMin(g.position);
    h.scene_bounds.hi = h.scene_bounds.hi.cwiseMax(g.position);
    const double rho = (g.position - geometry.origin).norm();
    h.rho_max = std::max(h.rho_max, rho);
    rho_min = std::min(rho_min, rho);
  }

  std::vector<Region> regions(model.size(), Region::kCenter);
  switch (scheme.kind) {
    case Scheme::kUniformXYZ:
      h.r_center = geometry.r_center;
      break;
    case Scheme::kSphericalNoSplit:
      if (!(h.rho_max > 0.0)) {
        throw DegenerateInputError("all gaussians coincide with the origin; no radial range");
      }
      h.r_center = std::max(rho_min, 1e-6 * h.rho_max);
      std::fill(regions.begin(), regions.end(), Region::kPeriphery);
      break;
    case Scheme::kSpherical3DoFPlus:
    case Scheme::kCartesianSplit:
      if (!(geometry.r_center > 0.0)) {
        throw DegenerateInputError("center radius must be positive for split schemes");
      }
      h.r_center = geometry.r_center;
      for (std::size_t i = 0; i < model.size(); ++i) {
        regions[i] = Classify(model.gaussians[i].position, geometry);
      }
      break;
  }

  q.permutation.reserve(model.size());
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    if (regions[i] == Region::kCenter) q.permutation.push_back(i);
  }
  h.n_center = q.permutation.size();
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    if (regions[i] == Region::kPeriphery) q.permutation.push_back(i);
  }
  Encode(model, &q);
  return q;
}

QuantizedModel RequantizeModel(const GaussianModel& model, const QuantizedModel& reference) {
  if (model.size() != reference.header.n_total) {
    throw ValidationError("model size does not match the reference quantization");
  }
  QuantizedModel q;
  q.header = reference.header;
  q.permutation = reference.permutation;
  Encode(model, &q);
  return q;
}

std::vector<std::array<std::uint32_t, 3>> UnpackCodes(const QuantizedModel& q) {
  const QuantHeader& h = q.header;
  CheckBits(h.bits_per_coord);
  if (q.codes.size() < CodeBytes(h.n_total, h.bits_per_coord)) {
    throw DecodeError("code array shorter than the header requires");
  }
  BitReader reader(q.codes);
  std::vector<std::array<std::uint32_t, 3>> codes(h.n_total);
  for (auto& triple : codes) {
    for (auto& c : triple) c = reader.Read(h.bits_per_coord);
  }
  return codes;
}

GaussianModel DequantizeModel(const QuantizedModel& q) {
  const QuantHeader& h = q.header;
  if (h.n_total == 0) throw DecodeError("container holds no gaussians");
  if (h.n_center > h.n_total) throw DecodeError("split index exceeds gaussian count");
  if (q.permutation.size() != h.n_total) throw DecodeError("permutation table size mismatch");
  const std::size_t record = RecordSize(q.layout, true);
  if (q.passthrough.size() != record * h.n_total) {
    throw DecodeError("passthrough block size mismatch");
  }
  const auto codes = UnpackCodes(q);
  const auto center_ranges = ChannelRanges(h, Region::kCenter);
  const auto periphery_ranges = ChannelRanges(h, Region::kPeriphery);

  GaussianModel model;
  model.layout = q.layout;
  model.sh_degree = q.layout.ShDegree();
  model.gaussians.resize(h.n_total);
  std::vector<bool> filled(h.n_total, false);
  for (std::uint64_t i = 0; i < h.n_total; ++i) {
    const std::uint32_t target = q.permutation[i];
    if (target >= h.n_total || filled[target]) throw DecodeError("permutation table is not a permutation");
    filled[target] = true;
    const Region region = i < h.n_center ? Region::kCenter : Region::kPeriphery;
    const auto& ranges = region == Region::kCenter ? center_ranges : periphery_ranges;
    std::array<double, 3> channels;
    for (int c = 0; c < 3; ++c) {
      channels[c] = DequantizeScalar(codes[i][c], ranges[c].lo, ranges[c].hi, h.bits_per_coord);
    }
    Gaussian g = DecodeRecord(q.passthrough.data() + i * record, q.layout, true, target);
    g.position = FromChannels(channels, h, region);
    model.gaussians[target] = std::move(g);
  }
  return model;
}

RateReport ComputeRateReport(Scheme scheme, int bits_per_coord, std::uint64_t n_total,
                             OverheadMode mode) {
  RateReport r;
  r.overhead_mode = mode;
  r.bits_per_coord_payload = bits_per_coord;
  if (SchemeHasSplit(scheme) && n_total > 0) {
    if (mode == OverheadMode::kPerGaussianFlag) {
      r.overhead_bits_per_coord = 1.0 / 3.0;
    } else {
      const double index_bits = std::ceil(std::log2(static_cast<double>(n_total) + 1.0));
      r.overhead_bits_per_coord = index_bits / (3.0 * static_cast<double>(n_total));
    }
  }
  r.total_bits_per_coord = r.bits_per_coord_payload + r.overhead_bits_per_coord;
  return r;
}

RateReport ComputeRateReport(const QuantizedModel& q, OverheadMode mode) {
  return ComputeRateReport(q.header.scheme, q.header.bits_per_coord, q.header.n_total, mode);
}

}  // namespace gsq
