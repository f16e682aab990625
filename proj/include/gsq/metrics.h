#ifndef GSQ_METRICS_H_
#define GSQ_METRICS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsq/image.h"
#include "gsq/model_io.h"
#include "gsq/quantization.h"
#include "gsq/renderer.h"

namespace gsq {

// (f x / z, f y / z); nullopt for points at or behind the camera plane.
std::optional<Vec2> PinholeProject(const Vec3& p_camera, double focal);

enum class ProjectionKind { kPinhole, kSpherical };

struct DistanceBin {
  double rho_lo = 0.0;
  double rho_hi = 0.0;
  double mean_px = 0.0;
  std::uint64_t count = 0;
};

inline constexpr int kDistanceBins = 16;

struct ProjectionErrorStats {
  double mean_px = 0.0;
  double max_px = 0.0;
  // Logarithmic bins over [min rho, max rho] of the original positions,
  // rho measured from the rig centroid.
  std::vector<DistanceBin> per_distance_bins;
  // Camera/gaussian pairs measured.
  std::uint64_t n_points = 0;
  // Pairs dropped because either position is behind the camera (pinhole)
  // or coincides with it.
  std::uint64_t n_excluded = 0;
};

// Screen displacement of gaussian centers between two aligned models,
// accumulated over every rig camera. Spherical displacement is the geodesic
// angle times the focal length. Pinhole uses each camera's orientation
// (identity when absent).
ProjectionErrorStats CenterDisplacement(const GaussianModel& original,
                                        const GaussianModel& reconstructed, const CameraRig& rig,
                                        ProjectionKind projection = ProjectionKind::kSpherical);

// Least-squares slope of log(mean_px) against log(bin center) over
// non-empty bins whose geometric center lies in [rho_lo, rho_hi].
// Returns nullopt with fewer than two usable bins.
std::optional<double> LogLogSlope(const ProjectionErrorStats& stats, double rho_lo, double rho_hi);
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

// 10 log10(255^2 / MSE) over all channels; +inf when identical.
double Psnr(const Image& a, const Image& b);
// PSNR of the mean squared error pooled over several image pairs.
double PooledPsnr(const std::vector<Image>& a, const std::vector<Image>& b);

// Radial sensitivity probes: keep each gaussian's direction from `origin`
// exact and quantize only its distance, either rho itself or t = 1/rho,
// uniformly over [lo, hi] in the chosen parameter.
enum class RadialParameter { kRho, kInverseRho };
GaussianModel QuantizeRadiusOnly(const GaussianModel& model, const Vec3& origin,
                                 RadialParameter parameter, double lo, double hi, int bits);

struct RDPoint {
  Scheme scheme = Scheme::kUniformXYZ;
  int bits_per_coord = 0;
  double overhead_bits = 0.0;
  double total_bits_per_coord = 0.0;
  double mean_px_error = 0.0;
  double max_px_error = 0.0;
  std::optional<double> psnr_db;
};

struct SweepOptions {
  std::vector<Scheme> schemes;
  std::vector<int> bits;
  OverheadMode overhead_mode = OverheadMode::kSplitIndex;
  bool render = false;
  ShMode sh_mode = ShMode::kDcOnly;
  ProjectionKind projection = ProjectionKind::kSpherical;
};

// One point per (scheme, bits) pair, schemes outermost. PSNR is measured on
// renders from every rig camera when `render` is set.
std::vector<RDPoint> RdSweep(const GaussianModel& model, const CameraRig& rig,
                             const RigGeometry& geometry, const SweepOptions& options);

inline constexpr const char* kSweepCsvHeader =
    "scheme,bits_per_coord,overhead_bits,total_bits_per_coord,mean_px,max_px,psnr_db";

std::string FormatSweepCsv(const std::vector<RDPoint>& points);
std::string FormatStats(const ProjectionErrorStats& stats);
std::string FormatBinsCsv(const ProjectionErrorStats& stats);

}  // namespace gsq

#endif  // GSQ_METRICS_H_
