#ifndef GSQ_RENDERER_H_
#define GSQ_RENDERER_H_

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gsq/image.h"
#include "gsq/model_io.h"

namespace gsq {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Pinhole camera. `rotation` maps world directions to camera axes
// (x right, y down, z forward); the principal point is the image center.
struct Camera {
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double focal_px = 1.0;
  int width = 1;
  int height = 1;
};

// Rows are right, down, forward for a camera looking along `forward`.
Mat3 LookRotation(const Vec3& forward, const Vec3& up = Vec3::UnitZ());

// Identity orientation when the rig does not carry one.
Camera CameraFromRig(const CameraRig& rig, std::size_t index);

struct Splat2D {
  Vec2 mean_px = Vec2::Zero();
  // Regularized screen-space covariance.
  Mat2 cov2d = Mat2::Identity();
  double depth = 0.0;
  Vec3 color = Vec3::Zero();
  double alpha_max = 0.0;
};

inline constexpr double kNearPlane = 0.01;
inline constexpr double kCov2dRegularization = 0.3;  // px^2 added to the diagonal
inline constexpr double kAlphaClamp = 0.99;
inline constexpr double kMinTransmittance = 1e-4;

enum class ShMode { kDcOnly, kFull };

Mat3 QuaternionToMatrix(const std::array<double, 4>& wxyz);

// R S S^T R^T with S = diag(exp(log_scale)).
Mat3 Covariance3D(const Gaussian& g);

// View-dependent color along `view_dir` (unit, camera to gaussian), clamped
// to [0, 1]. kDcOnly ignores sh_rest.
Vec3 ShColor(const Gaussian& g, int sh_degree, const Vec3& view_dir, ShMode mode);

// Returns nullopt when the center is closer than the near plane or the 3
// sigma ellipse lies entirely outside the image.
std::optional<Splat2D> ProjectSplat(const Gaussian& g, const Camera& cam, int sh_degree = 0,
                                    ShMode mode = ShMode::kDcOnly);

// Linear render before 8-bit conversion. `weight` holds the per-pixel sum of
// compositing weights.
struct RenderBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> rgb;
  std::vector<float> weight;
};

RenderBuffer RenderLinear(const GaussianModel& model, const Camera& cam,
                          ShMode mode = ShMode::kDcOnly);
Image ToImage(const RenderBuffer& buffer);
Image Render(const GaussianModel& model, const Camera& cam, ShMode mode = ShMode::kDcOnly);

}  // namespace gsq

#endif  // GSQ_RENDERER_H_
