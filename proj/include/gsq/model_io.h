#ifndef GSQ_MODEL_IO_H_
#define GSQ_MODEL_IO_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace gsq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Scalar types of the binary point-cloud format.
enum class PlyType : std::uint8_t {
  kInt8,
  kUInt8,
  kInt16,
  kUInt16,
  kInt32,
  kUInt32,
  kFloat32,
  kFloat64,
};

std::size_t PlyTypeSize(PlyType type);

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  // Spelling used in the source header ("float" vs "float32"); empty means
  // the canonical short name.
  std::string type_spelling;

  bool operator==(const PlyProperty&) const = default;
};

// Attribute layout of one vertex record plus the header lines needed to
// reproduce a source file byte for byte.
struct PlyLayout {
  std::vector<PlyProperty> properties;
  // Header lines between "format ..." and "element vertex ..." (comments,
  // obj_info), without trailing newline.
  std::vector<std::string> preamble;
  // The "format" line as read; written back verbatim.
  std::string format_line = "format binary_little_endian 1.0";

  std::size_t RecordSize() const;
  // Bytes per record taken by properties the codec does not interpret.
  std::size_t ExtraSize() const;
  int ShDegree() const;

  bool operator==(const PlyLayout&) const = default;
};

// Canonical layout written by the reference 3DGS exporter for the given SH
// degree: x y z nx ny nz f_dc_0..2 f_rest_* opacity scale_0..2 rot_0..3.
PlyLayout StandardLayout(int sh_degree);

struct Gaussian {
  Vec3 position = Vec3::Zero();
  std::array<float, 3> log_scale{};
  // Unit quaternion (w, x, y, z).
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};
  // The quaternion exactly as stored in the source file. Written back when
  // it still normalizes to `rotation`, so unmodified models round-trip.
  std::optional<std::array<float, 4>> stored_rotation;
  float opacity_logit = 0.0f;
  std::array<float, 3> sh_dc{};
  // Channel-major higher-order SH: sh_rest[c * K + k], K = (deg+1)^2 - 1.
  std::vector<float> sh_rest;
  // Raw bytes of attributes outside the known set, in layout order.
  std::vector<std::uint8_t> extra;
};

struct GaussianModel {
  std::vector<Gaussian> gaussians;
  int sh_degree = 0;
  PlyLayout layout = StandardLayout(0);

  std::size_t size() const { return gaussians.size(); }
};

// Number of higher-order SH coefficients per color channel.
int ShRestPerChannel(int sh_degree);

struct PlyHeader {
  PlyLayout layout;
  std::uint64_t count = 0;
  std::size_t payload_offset = 0;
};

// Parses and validates the header of a binary little-endian model.
PlyHeader ParseHeader(std::string_view bytes);

// Parses a binary little-endian model from memory. Throws ParseError for
// malformed bytes and ValidationError for non-finite values or degenerate
// quaternions.
GaussianModel ParseModel(std::string_view bytes);
std::vector<std::uint8_t> SerializeModel(const GaussianModel& model);

GaussianModel ReadModel(const std::filesystem::path& path);
void WriteModel(const GaussianModel& model, const std::filesystem::path& path);

// Record-level encoding shared with the quantized container. With
// `skip_position`, x/y/z are omitted from the record.
std::size_t RecordSize(const PlyLayout& layout, bool skip_position);
void EncodeRecord(const Gaussian& g, const PlyLayout& layout,
                  bool skip_position, std::uint8_t* out);
Gaussian DecodeRecord(const std::uint8_t* in, const PlyLayout& layout,
                      bool skip_position, std::size_t element_index);

// Header text ("ply" ... "end_header\n") for `count` vertices.
std::string FormatHeader(const PlyLayout& layout, std::uint64_t count);

// ---------------------------------------------------------------------------
// Camera rig sidecar.

struct RigCamera {
  Vec3 center = Vec3::Zero();
  // World-to-camera rotation; absent when the sidecar lists centers only.
  std::optional<Mat3> rotation;
};

struct CameraRig {
  std::vector<RigCamera> cameras;
  double focal_px = 0.0;
  int width = 0;
  int height = 0;

  std::vector<Vec3> Centers() const;
};

CameraRig ParseCameraRig(std::string_view json_text);
std::string SerializeCameraRig(const CameraRig& rig);
CameraRig ReadCameraRig(const std::filesystem::path& path);
void WriteCameraRig(const CameraRig& rig, const std::filesystem::path& path);

}  // namespace gsq

#endif  // GSQ_MODEL_IO_H_
