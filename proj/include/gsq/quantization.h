#ifndef GSQ_QUANTIZATION_H_
#define GSQ_QUANTIZATION_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsq/model_io.h"

namespace gsq {

// Rig-derived zoning. Gaussians closer than `r_center` to `origin` are
// center content.
struct RigGeometry {
  Vec3 origin = Vec3::Zero();
  double r_inner = 0.0;
  double r_center = 0.0;
  double multiplier = 1.0;
};

inline constexpr double kDefaultRadiusMultiplier = 1.5;

// origin = centroid of camera centers, r_inner = max distance to it,
// r_center = multiplier * r_inner. Throws DegenerateInputError when the rig
// has zero extent; use GeometryWithCenterRadius in that case.
RigGeometry DeriveGeometry(const CameraRig& rig, double multiplier = kDefaultRadiusMultiplier);
RigGeometry GeometryWithCenterRadius(const CameraRig& rig, double r_center);

enum class Region : std::uint8_t { kCenter, kPeriphery };

// Strict inequality: a gaussian at exactly r_center is periphery.
Region Classify(const Vec3& position, const RigGeometry& geometry);

enum class Scheme : std::uint8_t {
  kUniformXYZ = 0,         // "uniform"
  kSpherical3DoFPlus = 1,  // "ours"
  kSphericalNoSplit = 2,   // "no-split"
  kCartesianSplit = 3,     // "cartesian-split"
};

std::string_view SchemeName(Scheme scheme);
std::optional<Scheme> ParseSchemeName(std::string_view name);
bool SchemeHasSplit(Scheme scheme);

inline constexpr int kMinBits = 2;
inline constexpr int kMaxBits = 24;

struct QuantScheme {
  Scheme kind = Scheme::kSpherical3DoFPlus;
  int bits_per_coord = 16;
};

enum class OverheadMode : std::uint8_t { kSplitIndex = 0, kPerGaussianFlag = 1 };

std::string_view OverheadModeName(OverheadMode mode);

// Midrise uniform scalar quantizer with 2^bits cells over [lo, hi].
// Inputs outside the interval are clamped. Throws std::invalid_argument when
// lo >= hi or bits is outside [1, 31].
std::uint32_t QuantizeScalar(double x, double lo, double hi, int bits);
double DequantizeScalar(std::uint32_t code, double lo, double hi, int bits);

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

struct QuantHeader {
  Scheme scheme = Scheme::kSpherical3DoFPlus;
  int bits_per_coord = 16;
  OverheadMode overhead_mode = OverheadMode::kSplitIndex;
  Vec3 origin = Vec3::Zero();
  // Inner radius of the t-coded shell: R for the split schemes, the
  // floored minimum distance for kSphericalNoSplit.
  double r_center = 0.0;
  double rho_max = 0.0;
  Box scene_bounds;
  std::uint64_t n_total = 0;
  std::uint64_t n_center = 0;
};

struct QuantizedModel {
  QuantHeader header;
  // 3 * bits_per_coord bits per gaussian, stored order, LSB-first.
  std::vector<std::uint8_t> codes;
  // Layout of the source model; passthrough records are this layout minus
  // x, y, z.
  PlyLayout layout;
  std::vector<std::uint8_t> passthrough;
  // permutation[i] is the source index of the i-th stored gaussian.
  std::vector<std::uint32_t> permutation;
};

struct ChannelRange {
  double lo = 0.0;
  double hi = 1.0;
};

// Quantizer intervals of the three channels used for `region` under the
// header's scheme. Degenerate intervals are widened deterministically.
std::array<ChannelRange, 3> ChannelRanges(const QuantHeader& header, Region region);

// Parameter triple (x, y, z) or (theta, phi, t) for a position.
std::array<double, 3> ToChannels(const Vec3& position, const QuantHeader& header, Region region);
Vec3 FromChannels(const std::array<double, 3>& channels, const QuantHeader& header, Region region);

QuantizedModel QuantizeModel(const GaussianModel& model, const RigGeometry& geometry,
                             const QuantScheme& scheme,
                             OverheadMode overhead_mode = OverheadMode::kSplitIndex);

// Re-encodes `model` with the header, partition and permutation of
// `reference`. Used to check that bin centers are fixed points.
QuantizedModel RequantizeModel(const GaussianModel& model, const QuantizedModel& reference);

GaussianModel DequantizeModel(const QuantizedModel& q);

// Unpacked codes, three per stored gaussian.
std::vector<std::array<std::uint32_t, 3>> UnpackCodes(const QuantizedModel& q);

struct RateReport {
  double bits_per_coord_payload = 0.0;
  double overhead_bits_per_coord = 0.0;
  double total_bits_per_coord = 0.0;
  OverheadMode overhead_mode = OverheadMode::kSplitIndex;
};

RateReport ComputeRateReport(Scheme scheme, int bits_per_coord, std::uint64_t n_total,
                             OverheadMode mode);
RateReport ComputeRateReport(const QuantizedModel& q, OverheadMode mode);

// Container file (magic "GSQZ").
std::vector<std::uint8_t> SerializeQuantized(const QuantizedModel& q);
QuantizedModel ParseQuantized(std::span<const std::uint8_t> bytes);
QuantizedModel ReadQuantized(const std::filesystem::path& path);
void WriteQuantized(const QuantizedModel& q, const std::filesystem::path& path);

}  // namespace gsq

#endif  // GSQ_QUANTIZATION_H_
