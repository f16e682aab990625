#include "gsq/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Geometry>

#include "gsq/errors.h"
#include "gsq/spherical_geometry.h"

namespace gsq {
namespace {

std::string Fixed(double v, int digits = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double AngleBetween(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double SquaredError(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.rgb.size() != b.rgb.size()) {
    throw std::invalid_argument("PSNR inputs have different dimensions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rgb.size(); ++i) {
    const double d = double(a.rgb[i]) - double(b.rgb[i]);
    sum += d * d;
  }
  return sum;
}

double PsnrFromMse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace

std::optional<Vec2> PinholeProject(const Vec3& p, double focal) {
  if (p.z() <= 0.0) return std::nullopt;
  return Vec2(focal * p.x() / p.z(), focal * p.y() / p.z());
}

ProjectionErrorStats CenterDisplacement(const GaussianModel& original,
                                        const GaussianModel& reconstructed, const CameraRig& rig,
                                        ProjectionKind projection) {
  if (original.size() != reconstructed.size()) {
    throw ValidationError("models differ in gaussian count");
  }
  if (rig.cameras.empty()) throw DegenerateInputError("camera rig has no cameras");
  const Vec3 origin = GeometryWithCenterRadius(rig, 0.0).origin;
  const std::size_t n = original.size();

  std::vector<double> rho(n);
  double rho_min = std::numeric_limits<double>::infinity();
  double rho_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = (original.gaussians[i].position - origin).norm();
    if (rho[i] > 0.0) rho_min = std::min(rho_min, rho[i]);
    rho_max = std::max(rho_max, rho[i]);
  }
  if (!std::isfinite(rho_min)) rho_min = rho_max = 1.0;

  ProjectionErrorStats stats;
  stats.per_distance_bins.resize(kDistanceBins);
  const double log_lo = std::log(rho_min);
  const double log_span = std::log(rho_max) - log_lo;
  for (int b = 0; b < kDistanceBins; ++b) {
    stats.per_distance_bins[b].rho_lo = std::exp(log_lo + log_span * b / kDistanceBins);
    stats.per_distance_bins[b].rho_hi = std::exp(log_lo + log_span * (b + 1) / kDistanceBins);
  }
  stats.per_distance_bins.front().rho_lo = rho_min;
  stats.per_distance_bins.back().rho_hi = rho_max;
  auto bin_of = [&](double r) {
    if (!(r > rho_min) || log_span <= 0.0) return 0;
    const int b = static_cast<int>((std::log(r) - log_lo) / log_span * kDistanceBins);
    return std::clamp(b, 0, kDistanceBins - 1);
  };

  // Per-bin sums are accumulated camera by camera in a fixed order.
  std::vector<double> bin_sum(kDistanceBins, 0.0);
  double total = 0.0;
  for (const auto& cam : rig.cameras) {
    const Mat3 rotation = cam.rotation.value_or(Mat3::Identity());
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 a = original.gaussians[i].position - cam.center;
      const Vec3 b = reconstructed.gaussians[i].position - cam.center;
      double px = 0.0;
      if (projection == ProjectionKind::kPinhole) {
        const auto pa = PinholeProject(rotation * a, rig.focal_px);
        const auto pb = PinholeProject(rotation * b, rig.focal_px);
        if (!pa || !pb) {
          ++stats.n_excluded;
          continue;
        }
        px = (*pa - *pb).norm();
      } else {
        if (a.norm() == 0.0 || b.norm() == 0.0) {
          ++stats.n_excluded;
          continue;
        }
        px = rig.focal_px * AngleBetween(a, b);
      }
      auto& bin = stats.per_distance_bins[bin_of(rho[i])];
      bin_sum[&bin - stats.per_distance_bins.data()] += px;
      ++bin.count;
      total += px;
      stats.max_px = std::max(stats.max_px, px);
      ++stats.n_points;
    }
  }
  for (int b = 0; b < kDistanceBins; ++b) {
    auto& bin = stats.per_distance_bins[b];
    bin.mean_px = bin.count ? bin_sum[b] / static_cast<double>(bin.count) : 0.0;
  }
  stats.mean_px = stats.n_points ? total / static_cast<double>(stats.n_points) : 0.0;
  return stats;
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::optional<double> LogLogSlope(const ProjectionErrorStats& stats, double rho_lo, double rho_hi) {
  std::vector<double> x, y;
  for (const auto& bin : stats.per_distance_bins) {
    const double center = std::sqrt(bin.rho_lo * bin.rho_hi);
    if (bin.count == 0 || !(bin.mean_px > 0.0) || center < rho_lo || center > rho_hi) continue;
    x.push_back(center);
    y.push_back(bin.mean_px);
  }
  if (x.size() < 2) return std::nullopt;
  return LogLogSlope(x, y);
}

double Psnr(const Image& a, const Image& b) {
  return PsnrFromMse(SquaredError(a, b) / static_cast<double>(a.rgb.size()));
}

double PooledPsnr(const std::vector<Image>& a, const std::vector<Image>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("PSNR image lists differ");
  double sum = 0.0;
  double samples = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += SquaredError(a[i], b[i]);
    samples += static_cast<double>(a[i].rgb.size());
  }
  return PsnrFromMse(sum / samples);
}

GaussianModel QuantizeRadiusOnly(const GaussianModel& model, const Vec3& origin,
                                 RadialParameter parameter, double lo, double hi, int bits) {
  GaussianModel out = model;
  for (auto& g : out.gaussians) {
    const double rho = (g.position - origin).norm();
    if (rho == 0.0) continue;
    const Vec3 dir = (g.position - origin) / rho;
    double recon = 0.0;
    if (parameter == RadialParameter::kRho) {
      recon = DequantizeScalar(QuantizeScalar(rho, lo, hi, bits), lo, hi, bits);
    } else {
      recon = 1.0 / DequantizeScalar(QuantizeScalar(1.0 / rho, lo, hi, bits), lo, hi, bits);
    }
    g.position = origin + recon * dir;
  }
  return out;
}

std::vector<RDPoint> RdSweep(const GaussianModel& model, const CameraRig& rig,
                             const RigGeometry& geometry, const SweepOptions& options) {
  std::vector<Image> reference;
  if (options.render) {
    for (std::size_t c = 0; c < rig.cameras.size(); ++c) {
      reference.push_back(Render(model, CameraFromRig(rig, c), options.sh_mode));
    }
  }
  std::vector<RDPoint> points;
  for (Scheme scheme : options.schemes) {
    for (int bits : options.bits) {
      const QuantizedModel q = QuantizeModel(model, geometry, {scheme, bits}, options.overhead_mode);
      const GaussianModel recon = DequantizeModel(q);
      const RateReport rate = ComputeRateReport(q, options.overhead_mode);
      const ProjectionErrorStats stats = CenterDisplacement(model, recon, rig, options.projection);
      RDPoint point;
      point.scheme = scheme;
      point.bits_per_coord = bits;
      point.overhead_bits = rate.overhead_bits_per_coord;
      point.total_bits_per_coord = rate.total_bits_per_coord;
      point.mean_px_error = stats.mean_px;
      point.max_px_error = stats.max_px;
      if (options.render) {
        std::vector<Image> rendered;
        for (std::size_t c = 0; c < rig.cameras.size(); ++c) {
          rendered.push_back(Render(recon, CameraFromRig(rig, c), options.sh_mode));
        }
        point.psnr_db = PooledPsnr(reference, rendered);
      }
      points.push_back(point);
    }
  }
  return points;
}

std::string FormatSweepCsv(const std::vector<RDPoint>& points) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& p : points) {
    out += std::string(SchemeName(p.scheme)) + "," + std::to_string(p.bits_per_coord) + "," +
           Fixed(p.overhead_bits, 9) + "," + Fixed(p.total_bits_per_coord, 9) + "," +
           Fixed(p.mean_px_error) + "," + Fixed(p.max_px_error) + "," +
           (p.psnr_db ? Fixed(*p.psnr_db, 4) : std::string()) + "\n";
  }
  return out;
}

std::string FormatStats(const ProjectionErrorStats& stats) {
  std::string out;
  out += "pairs measured: " + std::to_string(stats.n_points) + "\n";
  out += "pairs excluded: " + std::to_string(stats.n_excluded) + "\n";
  out += "mean displacement (px): " + Fixed(stats.mean_px) + "\n";
  out += "max displacement (px): " + Fixed(stats.max_px) + "\n";
  return out;
}

std::string FormatBinsCsv(const ProjectionErrorStats& stats) {
  std::string out = "rho_lo,rho_hi,count,mean_px\n";
  for (const auto& b : stats.per_distance_bins) {
    out += Fixed(b.rho_lo) + "," + Fixed(b.rho_hi) + "," + std::to_string(b.count) + "," +
           Fixed(b.mean_px) + "\n";
  }
  return out;
}

}  // namespace gsq
