#include "cli.h"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gsq/errors.h"
#include "gsq/image.h"
#include "gsq/jacobian_check.h"
#include "gsq/metrics.h"
#include "gsq/model_io.h"
#include "gsq/quantization.h"
#include "gsq/renderer.h"
#include "gsq/synthetic_scenes.h"

namespace gsq {
namespace {

// Thrown for semantically invalid flag values found after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void WriteText(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<Scheme> ParseSchemes(const std::vector<std::string>& names) {
  std::vector<Scheme> schemes;
  for (const auto& name : names) {
    auto s = ParseSchemeName(name);
    if (!s) throw UsageError("unknown scheme '" + name + "'");
    schemes.push_back(*s);
  }
  return schemes;
}

OverheadMode ParseOverheadMode(const std::string& name) {
  if (name == "split-index") return OverheadMode::kSplitIndex;
  if (name == "flag") return OverheadMode::kPerGaussianFlag;
  throw UsageError("unknown overhead mode '" + name + "'");
}

struct GeometryFlags {
  double r_multiplier = kDefaultRadiusMultiplier;
  double r_center = 0.0;

  void Register(CLI::App* app) {
    app->add_option("--r-multiplier", r_multiplier, "Center radius as a multiple of the rig radius")
        ->check(CLI::Range(1.0, 1e6));
    app->add_option("--r-center", r_center, "Explicit center radius (overrides --r-multiplier)")
        ->check(CLI::PositiveNumber);
  }

  RigGeometry Resolve(const CameraRig& rig) const {
    return r_center > 0.0 ? GeometryWithCenterRadius(rig, r_center)
                          : DeriveGeometry(rig, r_multiplier);
  }
};

std::vector<double> ParseDoubles(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": invalid number '" + item + "'");
    }
  }
  if (values.size() != count) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(count) + " numbers");
  }
  return values;
}

}  // namespace

int RunCli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Position quantization for gaussian-splatting models under 3DoF+ viewing"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  std::string spec_arg = "garden-desk", out_model, out_rig, out_held_out;
  std::uint64_t seed = 42;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic 3DoF+ benchmark scene");
  generate->add_option("--spec", spec_arg, "Preset name (garden-desk) or JSON scene spec file");
  auto* seed_opt = generate->add_option("--seed", seed, "Scene seed (overrides the spec)");
  generate->add_option("--out-model", out_model, "Output model file")->required();
  generate->add_option("--out-rig", out_rig, "Output camera rig file")->required();
  generate->add_option("--out-held-out", out_held_out, "Output held-out camera rig file");
  generate->callback([&] {
    action = [&] {
      SceneSpec spec = spec_arg == "garden-desk" ? GardenDeskSpec() : ParseSceneSpec(ReadText(spec_arg));
      if (seed_opt->count() > 0) spec.seed = seed;
      const SyntheticScene scene = GenerateScene(spec);
      WriteModel(scene.model, out_model);
      WriteCameraRig(scene.rig, out_rig);
      if (!out_held_out.empty()) WriteCameraRig(scene.held_out, out_held_out);
      out << "generated " << scene.model.size() << " gaussians, " << scene.rig.cameras.size()
          << " cameras\n";
      return int{kExitOk};
    };
  });

  // quantize
  std::string model_path, rig_path, scheme_name, out_path, overhead_name = "split-index";
  int bits = 16;
  GeometryFlags geometry_flags;
  auto* quantize = app.add_subcommand("quantize", "Quantize model positions");
  quantize->add_option("--model", model_path, "Input model")->required();
  quantize->add_option("--rig", rig_path, "Camera rig")->required();
  quantize->add_option("--scheme", scheme_name, "uniform | ours | no-split | cartesian-split")
      ->required()
      ->check(CLI::IsMember({"uniform", "ours", "no-split", "cartesian-split"}));
  quantize->add_option("--bits", bits, "Bits per coordinate")->required()->check(CLI::Range(kMinBits, kMaxBits));
  quantize->add_option("--overhead-mode", overhead_name, "split-index | flag")
      ->check(CLI::IsMember({"split-index", "flag"}));
  quantize->add_option("--out", out_path, "Output container")->required();
  geometry_flags.Register(quantize);
  quantize->callback([&] {
    action = [&] {
      const GaussianModel model = ReadModel(model_path);
      const CameraRig rig = ReadCameraRig(rig_path);
      const OverheadMode mode = ParseOverheadMode(overhead_name);
      const QuantizedModel q = QuantizeModel(model, geometry_flags.Resolve(rig),
                                             {*ParseSchemeName(scheme_name), bits}, mode);
      WriteQuantized(q, out_path);
      const RateReport rate = ComputeRateReport(q, mode);
      out << "scheme: " << scheme_name << "\nbits_per_coord: " << bits
          << "\ngaussians: " << q.header.n_total << "\ncenter gaussians: " << q.header.n_center
          << "\noverhead_mode: " << OverheadModeName(mode)
          << "\noverhead_bits_per_coord: " << rate.overhead_bits_per_coord
          << "\ntotal_bits_per_coord: " << rate.total_bits_per_coord << "\n";
      return int{kExitOk};
    };
  });

  // dequantize
  std::string in_path;
  auto* dequantize = app.add_subcommand("dequantize", "Decode a container back to a model");
  dequantize->add_option("--in", in_path, "Input container")->required();
  dequantize->add_option("--out", out_path, "Output model")->required();
  dequantize->callback([&] {
    action = [&] {
      WriteModel(DequantizeModel(ReadQuantized(in_path)), out_path);
      return int{kExitOk};
    };
  });

  // render
  int camera_index = -1;
  std::string pose, sh_mode_name = "dc";
  double focal = 0.0;
  int width = 0, height = 0;
  auto* render = app.add_subcommand("render", "Render a view to a P6 image");
  render->add_option("--model", model_path, "Input model")->required();
  render->add_option("--rig", rig_path, "Camera rig (intrinsics and --camera-index poses)");
  auto* index_opt = render->add_option("--camera-index", camera_index, "Rig camera to render")
                        ->check(CLI::NonNegativeNumber);
  auto* pose_opt =
      render->add_option("--pose", pose, "cx,cy,cz,tx,ty,tz: camera center and look-at target");
  index_opt->excludes(pose_opt);
  render->add_option("--focal", focal, "Focal length in pixels (overrides the rig)")
      ->check(CLI::PositiveNumber);
  render->add_option("--width", width, "Image width (overrides the rig)")->check(CLI::PositiveNumber);
  render->add_option("--height", height, "Image height (overrides the rig)")->check(CLI::PositiveNumber);
  render->add_option("--sh-mode", sh_mode_name, "dc | full")->check(CLI::IsMember({"dc", "full"}));
  render->add_option("--out", out_path, "Output image")->required();
  render->callback([&] {
    action = [&] {
      if (index_opt->count() == 0 && pose_opt->count() == 0) {
        throw UsageError("render needs --camera-index or --pose");
      }
      if (index_opt->count() > 0 && rig_path.empty()) throw UsageError("--camera-index needs --rig");
      Camera cam;
      std::optional<CameraRig> rig;
      if (!rig_path.empty()) rig = ReadCameraRig(rig_path);
      if (index_opt->count() > 0) {
        if (static_cast<std::size_t>(camera_index) >= rig->cameras.size()) {
          throw UsageError("--camera-index out of range");
        }
        cam = CameraFromRig(*rig, camera_index);
      } else {
        const auto v = ParseDoubles(pose, 6, "--pose");
        cam.center = Vec3(v[0], v[1], v[2]);
        const Vec3 forward = Vec3(v[3], v[4], v[5]) - cam.center;
        if (forward.norm() == 0.0) throw UsageError("--pose target equals the camera center");
        cam.rotation = LookRotation(forward);
        if (rig) {
          cam.focal_px = rig->focal_px;
          cam.width = rig->width;
          cam.height = rig->height;
        }
      }
      if (focal > 0.0) cam.focal_px = focal;
      if (width > 0) cam.width = width;
      if (height > 0) cam.height = height;
      if (!rig && (focal <= 0.0 || width <= 0 || height <= 0)) {
        throw UsageError("without --rig, --focal, --width and --height are required");
      }
      const GaussianModel model = ReadModel(model_path);
      WritePpm(Render(model, cam, sh_mode_name == "full" ? ShMode::kFull : ShMode::kDcOnly), out_path);
      return int{kExitOk};
    };
  });

  // analyze
  std::string orig_path, recon_path, projection_name = "spherical", csv_path;
  auto* analyze = app.add_subcommand("analyze", "Screen-space displacement between two models");
  analyze->add_option("--orig", orig_path, "Original model")->required();
  analyze->add_option("--recon", recon_path, "Reconstructed model")->required();
  analyze->add_option("--rig", rig_path, "Camera rig")->required();
  analyze->add_option("--projection", projection_name, "pinhole | spherical")
      ->check(CLI::IsMember({"pinhole", "spherical"}));
  analyze->add_option("--csv", csv_path, "Write per-distance bins as CSV");
  analyze->callback([&] {
    action = [&] {
      const GaussianModel orig = ReadModel(orig_path);
      const GaussianModel recon = ReadModel(recon_path);
      const CameraRig rig = ReadCameraRig(rig_path);
      const auto stats = CenterDisplacement(
          orig, recon, rig,
          projection_name == "pinhole" ? ProjectionKind::kPinhole : ProjectionKind::kSpherical);
      out << FormatStats(stats);
      const double lo = stats.per_distance_bins.front().rho_lo;
      const double hi = stats.per_distance_bins.back().rho_hi;
      if (auto slope = LogLogSlope(stats, lo, hi)) out << "log-log slope vs rho: " << *slope << "\n";
      if (!csv_path.empty()) WriteText(FormatBinsCsv(stats), csv_path);
      else out << FormatBinsCsv(stats);
      return int{kExitOk};
    };
  });

  // sweep / ablate
  std::vector<std::string> scheme_names;
  std::vector<int> bit_list{12, 14, 16};
  bool do_render = false;
  auto add_sweep = [&](const char* name, const char* help, std::vector<std::string> default_schemes) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--model", model_path, "Input model")->required();
    cmd->add_option("--rig", rig_path, "Camera rig (training views)")->required();
    cmd->add_option("--schemes", scheme_names, "Comma-separated schemes")
        ->delimiter(',')
        ->check(CLI::IsMember({"uniform", "ours", "no-split", "cartesian-split"}));
    cmd->add_option("--bits", bit_list, "Comma-separated bits per coordinate")
        ->delimiter(',')
        ->check(CLI::Range(kMinBits, kMaxBits));
    cmd->add_flag("--render", do_render, "Render every rig view and report PSNR");
    cmd->add_option("--overhead-mode", overhead_name, "split-index | flag")
        ->check(CLI::IsMember({"split-index", "flag"}));
    cmd->add_option("--sh-mode", sh_mode_name, "dc | full")->check(CLI::IsMember({"dc", "full"}));
    cmd->add_option("--out", out_path, "Output CSV")->required();
    geometry_flags.Register(cmd);
    cmd->callback([&, cmd, default_schemes] {
      action = [&, default_schemes] {
        if (scheme_names.empty()) scheme_names = default_schemes;
        const GaussianModel model = ReadModel(model_path);
        const CameraRig rig = ReadCameraRig(rig_path);
        SweepOptions options;
        options.schemes = ParseSchemes(scheme_names);
        options.bits = bit_list;
        options.overhead_mode = ParseOverheadMode(overhead_name);
        options.render = do_render;
        options.sh_mode = sh_mode_name == "full" ? ShMode::kFull : ShMode::kDcOnly;
        const auto points = RdSweep(model, rig, geometry_flags.Resolve(rig), options);
        const std::string csv = FormatSweepCsv(points);
        WriteText(csv, out_path);
        out << csv;
        return int{kExitOk};
      };
      (void)cmd;
    });
  };
  add_sweep("sweep", "Rate-distortion sweep over schemes and bit depths", {"uniform", "ours"});
  add_sweep("ablate", "Sweep including the ablation schemes",
            {"uniform", "ours", "no-split", "cartesian-split"});

  // check-jacobians
  int samples = 1000;
  double tolerance = kJacobianTolerance;
  auto* check = app.add_subcommand("check-jacobians", "Compare analytic Jacobians with finite differences");
  check->add_option("--samples", samples, "Number of random configurations")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "Sampling seed");
  check->add_option("--tolerance", tolerance, "Maximum relative error")->check(CLI::PositiveNumber);
  check->callback([&] {
    action = [&] {
      const auto report = CheckJacobians(samples, seed, tolerance);
      out << FormatJacobianReport(report);
      return int{report.passed ? kExitOk : kExitValidation};
    };
  });

  // psnr
  std::string image_a, image_b;
  auto* psnr = app.add_subcommand("psnr", "PSNR between two P6 images");
  psnr->add_option("a", image_a, "First image")->required();
  psnr->add_option("b", image_b, "Second image")->required();
  psnr->callback([&] {
    action = [&] {
      out << Psnr(ReadPpm(image_a), ReadPpm(image_b)) << "\n";
      return int{kExitOk};
    };
  });

  std::vector<const char*> args;
  for (const auto& a : argv) args.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DegenerateInputError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace gsq
