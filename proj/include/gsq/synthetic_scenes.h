#ifndef GSQ_SYNTHETIC_SCENES_H_
#define GSQ_SYNTHETIC_SCENES_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "gsq/model_io.h"

namespace gsq {

enum class DistanceLaw { kLogUniform, kUniform };

struct SceneSpec {
  std::uint64_t seed = 42;
  int n_gaussians = 20000;
  int n_cameras = 16;
  int n_held_out = 4;
  // Radius of the ball holding the camera centers.
  double r_rig = 1.0;
  double rho_lo = 0.5;
  double rho_hi = 300.0;
  DistanceLaw distance_law = DistanceLaw::kLogUniform;
  // World-space splat standard deviation per unit of distance to the rig
  // center, so far content keeps a comparable pixel footprint.
  double splat_scale = 0.01;
  // Gaussians are resampled when they land closer than this to any camera
  // center (training or held out); captured scenes have free space around
  // the capture positions.
  double camera_clearance = 0.25;
  double focal_px = 300.0;
  int width = 400;
  int height = 300;
};

// The "garden-desk" benchmark: seed 42, 20k gaussians, 16 cameras,
// r_rig = 1, rho in [0.5, 300] log-uniform, 400x300 views.
SceneSpec GardenDeskSpec();

// Named preset or a JSON object whose keys override the garden-desk
// defaults. Throws ParseError on unknown keys.
SceneSpec ParseSceneSpec(std::string_view text);

struct SyntheticScene {
  GaussianModel model;
  CameraRig rig;
  CameraRig held_out;
};

// Deterministic given spec.seed. Camera centers are recentred on their
// centroid and kept inside r_rig; cameras look away from the rig center.
SyntheticScene GenerateScene(const SceneSpec& spec);

}  // namespace gsq

#endif  // GSQ_SYNTHETIC_SCENES_H_
