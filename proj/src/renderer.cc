#include "gsq/renderer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <Eigen/Dense>

#include "gsq/errors.h"

namespace gsq {
namespace {

constexpr int kTileSize = 16;
constexpr double kSigmaExtent = 3.0;
constexpr double kFrustumMargin = 1.3;

constexpr double kShC0 = 0.28209479177387814;
constexpr double kShC1 = 0.4886025119029199;
constexpr double kShC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kShC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct PreparedSplat {
  Vec2 mean;
  // Inverse covariance (conic) entries.
  double a, b, c;
  Vec3 color;
  double alpha_max;
  int x0, x1, y0, y1;  // inclusive pixel bounds
};

}  // namespace

Mat3 LookRotation(const Vec3& forward, const Vec3& up) {
  const Vec3 z = forward.normalized();
  Vec3 hint = up;
  if (std::abs(z.dot(hint.normalized())) > 0.999) hint = Vec3::UnitX();
  const Vec3 x = z.cross(hint).normalized();
  const Vec3 y = z.cross(x);  // image y grows downward
  Mat3 r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return r;
}

Camera CameraFromRig(const CameraRig& rig, std::size_t index) {
  if (index >= rig.cameras.size()) throw std::out_of_range("camera index out of range");
  Camera cam;
  cam.center = rig.cameras[index].center;
  cam.rotation = rig.cameras[index].rotation.value_or(Mat3::Identity());
  cam.focal_px = rig.focal_px;
  cam.width = rig.width;
  cam.height = rig.height;
  return cam;
}

Mat3 QuaternionToMatrix(const std::array<double, 4>& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Mat3 Covariance3D(const Gaussian& g) {
  const Mat3 r = QuaternionToMatrix(g.rotation);
  const Vec3 s(std::exp(double(g.log_scale[0])), std::exp(double(g.log_scale[1])),
               std::exp(double(g.log_scale[2])));
  const Mat3 m = r * s.asDiagonal();
  return m * m.transpose();
}

Vec3 ShColor(const Gaussian& g, int sh_degree, const Vec3& dir, ShMode mode) {
  Vec3 color;
  const int k = ShRestPerChannel(sh_degree);
  const bool full = mode == ShMode::kFull && sh_degree > 0 &&
                    g.sh_rest.size() >= static_cast<std::size_t>(3 * k);
  const double x = dir.x(), y = dir.y(), z = dir.z();
  for (int c = 0; c < 3; ++c) {
    double v = kShC0 * g.sh_dc[c];
    if (full) {
      auto sh = [&](int i) { return double(g.sh_rest[c * k + i - 1]); };
      v += -kShC1 * y * sh(1) + kShC1 * z * sh(2) - kShC1 * x * sh(3);
      if (sh_degree > 1) {
        const double xx = x * x, yy = y * y, zz = z * z;
        v += kShC2[0] * x * y * sh(4) + kShC2[1] * y * z * sh(5) +
             kShC2[2] * (2 * zz - xx - yy) * sh(6) + kShC2[3] * x * z * sh(7) +
             kShC2[4] * (xx - yy) * sh(8);
        if (sh_degree > 2) {
          v += kShC3[0] * y * (3 * xx - yy) * sh(9) + kShC3[1] * x * y * z * sh(10) +
               kShC3[2] * y * (4 * zz - xx - yy) * sh(11) +
               kShC3[3] * z * (2 * zz - 3 * xx - 3 * yy) * sh(12) +
               kShC3[4] * x * (4 * zz - xx - yy) * sh(13) + kShC3[5] * z * (xx - yy) * sh(14) +
               kShC3[6] * x * (xx - 3 * yy) * sh(15);
        }
      }
    }
    color[c] = std::clamp(v + 0.5, 0.0, 1.0);
  }
  return color;
}

std::optional<Splat2D> ProjectSplat(const Gaussian& g, const Camera& cam, int sh_degree,
                                    ShMode mode) {
  const Vec3 t = cam.rotation * (g.position - cam.center);
  if (t.z() <= kNearPlane) return std::nullopt;
  const double f = cam.focal_px;
  const double inv_z = 1.0 / t.z();
  // The Jacobian is evaluated with the lateral offset clamped to a margin
  // around the frustum, so far off-screen splats do not blow up.
  const double lim_x = kFrustumMargin * 0.5 * cam.width / f;
  const double lim_y = kFrustumMargin * 0.5 * cam.height / f;
  const double jx = std::clamp(t.x() * inv_z, -lim_x, lim_x) * t.z();
  const double jy = std::clamp(t.y() * inv_z, -lim_y, lim_y) * t.z();
  Eigen::Matrix<double, 2, 3> jac;
  jac << f * inv_z, 0.0, -f * jx * inv_z * inv_z,
         0.0, f * inv_z, -f * jy * inv_z * inv_z;
  const Eigen::Matrix<double, 2, 3> jw = jac * cam.rotation;

  Splat2D s;
  s.mean_px = Vec2(f * t.x() * inv_z + 0.5 * cam.width, f * t.y() * inv_z + 0.5 * cam.height);
  s.cov2d = jw * Covariance3D(g) * jw.transpose();
  s.cov2d(0, 0) += kCov2dRegularization;
  s.cov2d(1, 1) += kCov2dRegularization;
  s.depth = t.z();

  const double mid = 0.5 * (s.cov2d(0, 0) + s.cov2d(1, 1));
  const double det = s.cov2d.determinant();
  const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
  const double radius = kSigmaExtent * std::sqrt(lambda_max);
  if (s.mean_px.x() + radius < 0.0 || s.mean_px.x() - radius > cam.width ||
      s.mean_px.y() + radius < 0.0 || s.mean_px.y() - radius > cam.height) {
    return std::nullopt;
  }
  s.color = ShColor(g, sh_degree, (g.position - cam.center).normalized(), mode);
  s.alpha_max = Sigmoid(g.opacity_logit);
  return s;
}

RenderBuffer RenderLinear(const GaussianModel& model, const Camera& cam, ShMode mode) {
  if (cam.width <= 0 || cam.height <= 0 || !(cam.focal_px > 0.0)) {
    throw std::invalid_argument("camera must have positive image size and focal length");
  }
  RenderBuffer out;
  out.width = cam.width;
  out.height = cam.height;
  const std::size_t pixels = static_cast<std::size_t>(cam.width) * cam.height;
  out.rgb.assign(3 * pixels, 0.0f);
  out.weight.assign(pixels, 0.0f);

  // Project, then sort front to back; ties keep gaussian order.
  std::vector<std::pair<double, std::uint32_t>> order;
  std::vector<PreparedSplat> splats;
  for (std::uint32_t i = 0; i < model.size(); ++i) {
    auto s = ProjectSplat(model.gaussians[i], cam, model.sh_degree, mode);
    if (!s) continue;
    const double det = s->cov2d.determinant();
    if (!(det > 0.0)) continue;
    const double mid = 0.5 * (s->cov2d(0, 0) + s->cov2d(1, 1));
    const double radius =
        kSigmaExtent * std::sqrt(mid + std::sqrt(std::max(0.0, mid * mid - det)));
    PreparedSplat p;
    p.mean = s->mean_px;
    p.a = s->cov2d(1, 1) / det;
    p.b = -s->cov2d(0, 1) / det;
    p.c = s->cov2d(0, 0) / det;
    p.color = s->color;
    p.alpha_max = s->alpha_max;
    // Pixel (x, y) is sampled at (x + 0.5, y + 0.5).
    p.x0 = std::max(0, static_cast<int>(std::floor(p.mean.x() - radius - 0.5)));
    p.x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(p.mean.x() + radius - 0.5)));
    p.y0 = std::max(0, static_cast<int>(std::floor(p.mean.y() - radius - 0.5)));
    p.y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(p.mean.y() + radius - 0.5)));
    if (p.x0 > p.x1 || p.y0 > p.y1) continue;
    order.emplace_back(s->depth, static_cast<std::uint32_t>(splats.size()));
    splats.push_back(p);
  }
  std::sort(order.begin(), order.end());

  const int tiles_x = (cam.width + kTileSize - 1) / kTileSize;
  const int tiles_y = (cam.height + kTileSize - 1) / kTileSize;
  std::vector<std::vector<std::uint32_t>> tiles(static_cast<std::size_t>(tiles_x) * tiles_y);
  for (const auto& [depth, index] : order) {
    const auto& p = splats[index];
    for (int ty = p.y0 / kTileSize; ty <= p.y1 / kTileSize; ++ty) {
      for (int tx = p.x0 / kTileSize; tx <= p.x1 / kTileSize; ++tx) {
        tiles[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(index);
      }
    }
  }

  auto render_tile_row = [&](int ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      const auto& list = tiles[static_cast<std::size_t>(ty) * tiles_x + tx];
      const int y_end = std::min(cam.height, (ty + 1) * kTileSize);
      const int x_end = std::min(cam.width, (tx + 1) * kTileSize);
      for (int y = ty * kTileSize; y < y_end; ++y) {
        for (int x = tx * kTileSize; x < x_end; ++x) {
          double transmittance = 1.0;
          double weight = 0.0;
          Vec3 color = Vec3::Zero();
          for (std::uint32_t index : list) {
            const auto& p = splats[index];
            if (x < p.x0 || x > p.x1 || y < p.y0 || y > p.y1) continue;
            const double dx = x + 0.5 - p.mean.x();
            const double dy = y + 0.5 - p.mean.y();
            const double power = -0.5 * (p.a * dx * dx + 2.0 * p.b * dx * dy + p.c * dy * dy);
            const double alpha = std::min(kAlphaClamp, p.alpha_max * std::exp(power));
            color += (alpha * transmittance) * p.color;
            weight += alpha * transmittance;
            transmittance *= 1.0 - alpha;
            if (transmittance < kMinTransmittance) break;
          }
          const std::size_t pixel = static_cast<std::size_t>(y) * cam.width + x;
          for (int c = 0; c < 3; ++c) out.rgb[3 * pixel + c] = static_cast<float>(color[c]);
          out.weight[pixel] = static_cast<float>(weight);
        }
      }
    }
  };

  const int workers = std::max(1, std::min<int>(std::thread::hardware_concurrency(), tiles_y));
  if (workers == 1) {
    for (int ty = 0; ty < tiles_y; ++ty) render_tile_row(ty);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int ty = w; ty < tiles_y; ty += workers) render_tile_row(ty);
      });
    }
  }
  return out;
}

Image ToImage(const RenderBuffer& buffer) {
  Image image(buffer.width, buffer.height);
  for (std::size_t i = 0; i < buffer.rgb.size(); ++i) {
    const double v = std::clamp(static_cast<double>(buffer.rgb[i]), 0.0, 1.0);
    image.rgb[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return image;
}

Image Render(const GaussianModel& model, const Camera& cam, ShMode mode) {
  return ToImage(RenderLinear(model, cam, mode));
}

}  // namespace gsq
