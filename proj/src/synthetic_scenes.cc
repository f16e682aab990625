#include "gsq/synthetic_scenes.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gsq/errors.h"
#include "gsq/renderer.h"
#include "gsq/rng.h"

namespace gsq {
namespace {

CameraRig MakeRig(const SceneSpec& spec, int count, Rng& rng) {
  CameraRig rig;
  rig.focal_px = spec.focal_px;
  rig.width = spec.width;
  rig.height = spec.height;
  std::vector<Vec3> centers;
  std::vector<Vec3> fallback_dirs;
  for (int i = 0; i < count; ++i) {
    const double r = spec.r_rig * std::cbrt(rng.Uniform());
    centers.push_back(r * rng.UnitVector());
    fallback_dirs.push_back(rng.UnitVector());
  }
  if (count > 1) {
    Vec3 centroid = Vec3::Zero();
    for (const auto& c : centers) centroid += c;
    centroid /= count;
    double reach = 0.0;
    for (auto& c : centers) {
      c -= centroid;
      reach = std::max(reach, c.norm());
    }
    if (reach > spec.r_rig) {
      for (auto& c : centers) c *= spec.r_rig / reach;
    }
  }
  for (int i = 0; i < count; ++i) {
    const Vec3 forward =
        centers[i].norm() > 1e-3 * spec.r_rig ? centers[i].normalized() : fallback_dirs[i];
    rig.cameras.push_back({centers[i], LookRotation(forward)});
  }
  return rig;
}

}  // namespace

SceneSpec GardenDeskSpec() { return SceneSpec{}; }

SceneSpec ParseSceneSpec(std::string_view text) {
  if (text == "garden-desk") return GardenDeskSpec();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scene spec: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("scene spec must be a JSON object");
  SceneSpec spec = GardenDeskSpec();
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "seed") spec.seed = value.get<std::uint64_t>();
      else if (key == "n_gaussians") spec.n_gaussians = value.get<int>();
      else if (key == "n_cameras") spec.n_cameras = value.get<int>();
      else if (key == "n_held_out") spec.n_held_out = value.get<int>();
      else if (key == "r_rig") spec.r_rig = value.get<double>();
      else if (key == "rho_lo") spec.rho_lo = value.get<double>();
      else if (key == "rho_hi") spec.rho_hi = value.get<double>();
      else if (key == "splat_scale") spec.splat_scale = value.get<double>();
      else if (key == "camera_clearance") spec.camera_clearance = value.get<double>();
      else if (key == "focal_px") spec.focal_px = value.get<double>();
      else if (key == "width") spec.width = value.get<int>();
      else if (key == "height") spec.height = value.get<int>();
      else if (key == "distance_law") {
        const auto law = value.get<std::string>();
        if (law == "log_uniform") spec.distance_law = DistanceLaw::kLogUniform;
        else if (law == "uniform") spec.distance_law = DistanceLaw::kUniform;
        else throw ParseError("scene spec: unknown distance_law '" + law + "'");
      } else {
        throw ParseError("scene spec: unknown field '" + key + "'");
      }
    } catch (const nlohmann::json::type_error&) {
      throw ParseError("scene spec: field '" + key + "' has the wrong type");
    }
  }
  return spec;
}

SyntheticScene GenerateScene(const SceneSpec& spec) {
  if (spec.n_gaussians < 1) throw std::invalid_argument("scene needs at least one gaussian");
  if (spec.n_cameras < 1) throw std::invalid_argument("scene needs at least one camera");
  if (!(spec.rho_lo > 0.0) || spec.rho_hi < spec.rho_lo) {
    throw std::invalid_argument("scene distance range must satisfy 0 < rho_lo <= rho_hi");
  }

  SyntheticScene scene;
  Rng camera_rng(SubSeed(spec.seed, 0));
  Rng gaussian_rng(SubSeed(spec.seed, 1));
  Rng held_out_rng(SubSeed(spec.seed, 2));
  scene.rig = MakeRig(spec, spec.n_cameras, camera_rng);
  scene.held_out = MakeRig(spec, spec.n_held_out, held_out_rng);

  GaussianModel& model = scene.model;
  model.sh_degree = 0;
  model.layout = StandardLayout(0);
  model.gaussians.reserve(spec.n_gaussians);
  std::vector<Vec3> all_centers = scene.rig.Centers();
  for (const auto& c : scene.held_out.cameras) all_centers.push_back(c.center);
  auto clear_of_cameras = [&](const Vec3& p) {
    for (const auto& c : all_centers) {
      if ((p - c).norm() < spec.camera_clearance) return false;
    }
    return true;
  };
  const double log_lo = std::log(spec.rho_lo);
  const double log_hi = std::log(spec.rho_hi);
  for (int i = 0; i < spec.n_gaussians; ++i) {
    Rng& rng = gaussian_rng;
    double rho = 0.0;
    Vec3 p;
    for (int attempt = 0;; ++attempt) {
      const double u = rng.Uniform();
      rho = spec.distance_law == DistanceLaw::kLogUniform
                ? std::exp(log_lo + u * (log_hi - log_lo))
                : spec.rho_lo + u * (spec.rho_hi - spec.rho_lo);
      p = rho * rng.UnitVector();
      if (clear_of_cameras(p)) break;
      if (attempt > 1000) {
        throw std::invalid_argument("camera_clearance leaves no room for gaussians");
      }
    }
    Gaussian g;
    g.position = p;
    for (auto& s : g.log_scale) {
      s = static_cast<float>(std::log(spec.splat_scale * rho) + 0.3 * rng.Normal());
    }
    std::array<float, 4> q;
    double norm = 0.0;
    do {
      for (auto& c : q) c = static_cast<float>(rng.Normal());
      norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] + double(q[2]) * q[2] +
                       double(q[3]) * q[3]);
    } while (norm < 1e-3);
    g.stored_rotation = q;
    for (int c = 0; c < 4; ++c) g.rotation[c] = q[c] / norm;
    g.opacity_logit = static_cast<float>(rng.Uniform(0.0, 3.0));
    for (auto& c : g.sh_dc) c = static_cast<float>(rng.Uniform(-1.6, 1.6));
    g.extra.assign(model.layout.ExtraSize(), 0);
    model.gaussians.push_back(std::move(g));
  }
  return scene;
}

}  // namespace gsq
