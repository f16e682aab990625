#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "gsq/errors.h"
#include "gsq/model_io.h"

namespace gsq {
namespace {

using nlohmann::json;

const json& Field(const json& obj, const char* name, const std::string& context) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ParseError("camera rig: missing field '" + context + name + "'");
  }
  return obj.at(name);
}

double Number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ParseError("camera rig: field '" + field + "' must be a number");
  return value.get<double>();
}

Vec3 ReadVec3(const json& value, const std::string& field) {
  if (!value.is_array() || value.size() != 3) {
    throw ParseError("camera rig: field '" + field + "' must be an array of 3 numbers");
  }
  return {Number(value[0], field), Number(value[1], field), Number(value[2], field)};
}

}  // namespace

std::vector<Vec3> CameraRig::Centers() const {
  std::vector<Vec3> centers;
  centers.reserve(cameras.size());
  for (const auto& c : cameras) centers.push_back(c.center);
  return centers;
}

CameraRig ParseCameraRig(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("camera rig: ") + e.what(), e.byte);
  }
  CameraRig rig;
  const auto& cameras = Field(doc, "cameras", "");
  if (!cameras.is_array()) throw ParseError("camera rig: field 'cameras' must be an array");
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    const std::string context = "cameras[" + std::to_string(i) + "].";
    RigCamera cam;
    cam.center = ReadVec3(Field(cameras[i], "center", context), context + "center");
    if (cameras[i].contains("rotation")) {
      const auto& rows = cameras[i].at("rotation");
      if (!rows.is_array() || rows.size() != 3) {
        throw ParseError("camera rig: field '" + context + "rotation' must be a 3x3 array");
      }
      Mat3 r;
      for (int row = 0; row < 3; ++row) r.row(row) = ReadVec3(rows[row], context + "rotation").transpose();
      cam.rotation = r;
    }
    rig.cameras.push_back(cam);
  }
  rig.focal_px = Number(Field(doc, "focal_px", ""), "focal_px");
  rig.width = static_cast<int>(Number(Field(doc, "width", ""), "width"));
  rig.height = static_cast<int>(Number(Field(doc, "height", ""), "height"));

  if (rig.cameras.empty()) throw ValidationError("camera rig has no cameras");
  if (!(rig.focal_px > 0.0)) throw ValidationError("camera rig focal_px must be positive");
  if (rig.width <= 0 || rig.height <= 0) throw ValidationError("camera rig image size must be positive");
  return rig;
}

std::string SerializeCameraRig(const CameraRig& rig) {
  json doc;
  doc["cameras"] = json::array();
  for (const auto& cam : rig.cameras) {
    json entry;
    entry["center"] = {cam.center.x(), cam.center.y(), cam.center.z()};
    if (cam.rotation) {
      const Mat3& r = *cam.rotation;
      entry["rotation"] = json::array();
      for (int row = 0; row < 3; ++row) entry["rotation"].push_back({r(row, 0), r(row, 1), r(row, 2)});
    }
    doc["cameras"].push_back(std::move(entry));
  }
  doc["focal_px"] = rig.focal_px;
  doc["width"] = rig.width;
  doc["height"] = rig.height;
  return doc.dump(2) + "\n";
}

CameraRig ReadCameraRig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open camera rig '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseCameraRig(text);
}

void WriteCameraRig(const CameraRig& rig, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << SerializeCameraRig(rig);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace gsq
