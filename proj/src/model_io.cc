#include "gsq/model_io.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "gsq/errors.h"

namespace gsq {
namespace {

struct TypeName {
  std::string_view name;
  PlyType type;
};

constexpr TypeName kTypeNames[] = {
    {"char", PlyType::kInt8},      {"int8", PlyType::kInt8},
    {"uchar", PlyType::kUInt8},    {"uint8", PlyType::kUInt8},
    {"short", PlyType::kInt16},    {"int16", PlyType::kInt16},
    {"ushort", PlyType::kUInt16},  {"uint16", PlyType::kUInt16},
    {"int", PlyType::kInt32},      {"int32", PlyType::kInt32},
    {"uint", PlyType::kUInt32},    {"uint32", PlyType::kUInt32},
    {"float", PlyType::kFloat32},  {"float32", PlyType::kFloat32},
    {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64},
};

std::string_view CanonicalTypeName(PlyType type) {
  for (const auto& t : kTypeNames) {
    if (t.type == type) return t.name;
  }
  return "float";
}

// Where a record field lands inside a Gaussian.
enum class SlotKind { kPosition, kScale, kRotation, kOpacity, kDc, kRest, kExtra };

struct Slot {
  SlotKind kind;
  int index;             // component index, or byte offset into `extra`
  std::size_t size;      // bytes in the record
};

// Returns the known-attribute slot for `name`, if any.
std::optional<Slot> KnownSlot(const std::string& name) {
  static const std::map<std::string, Slot, std::less<>> kFixed = {
      {"x", {SlotKind::kPosition, 0, 4}},   {"y", {SlotKind::kPosition, 1, 4}},
      {"z", {SlotKind::kPosition, 2, 4}},   {"opacity", {SlotKind::kOpacity, 0, 4}},
      {"scale_0", {SlotKind::kScale, 0, 4}}, {"scale_1", {SlotKind::kScale, 1, 4}},
      {"scale_2", {SlotKind::kScale, 2, 4}}, {"rot_0", {SlotKind::kRotation, 0, 4}},
      {"rot_1", {SlotKind::kRotation, 1, 4}}, {"rot_2", {SlotKind::kRotation, 2, 4}},
      {"rot_3", {SlotKind::kRotation, 3, 4}}, {"f_dc_0", {SlotKind::kDc, 0, 4}},
      {"f_dc_1", {SlotKind::kDc, 1, 4}},     {"f_dc_2", {SlotKind::kDc, 2, 4}},
  };
  if (auto it = kFixed.find(name); it != kFixed.end()) return it->second;
  constexpr std::string_view kRest = "f_rest_";
  if (name.starts_with(kRest) && name.size() > kRest.size()) {
    int k = 0;
    for (char c : std::string_view(name).substr(kRest.size())) {
      if (c < '0' || c > '9') return std::nullopt;
      k = k * 10 + (c - '0');
      if (k > 1000) return std::nullopt;
    }
    return Slot{SlotKind::kRest, k, 4};
  }
  return std::nullopt;
}

std::vector<Slot> ResolveSlots(const PlyLayout& layout, bool skip_position) {
  std::vector<Slot> slots;
  slots.reserve(layout.properties.size());
  int extra_offset = 0;
  for (const auto& prop : layout.properties) {
    auto known = KnownSlot(prop.name);
    if (known) {
      if (skip_position && known->kind == SlotKind::kPosition) continue;
      slots.push_back(*known);
    } else {
      const auto size = PlyTypeSize(prop.type);
      slots.push_back({SlotKind::kExtra, extra_offset, size});
      extra_offset += static_cast<int>(size);
    }
  }
  return slots;
}

float LoadFloat(const std::uint8_t* p) {
  float v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

void StoreFloat(float v, std::uint8_t* p) { std::memcpy(p, &v, sizeof v); }

std::array<double, 4> Normalize(const std::array<float, 4>& q) {
  const double norm = std::sqrt(double(q[0]) * q[0] + double(q[1]) * q[1] +
                                double(q[2]) * q[2] + double(q[3]) * q[3]);
  return {q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm};
}

constexpr double kMinQuaternionNorm = 1e-4;

// Splits the header into lines, returning the payload start offset.
struct HeaderLine {
  std::string text;
  std::size_t offset;
};

std::size_t SplitHeader(std::string_view bytes, std::vector<HeaderLine>* lines) {
  std::size_t pos = 0;
  while (true) {
    const auto end = bytes.find('\n', pos);
    if (end == std::string_view::npos) {
      throw ParseError("header not terminated by end_header", bytes.size());
    }
    lines->push_back({std::string(bytes.substr(pos, end - pos)), pos});
    pos = end + 1;
    if (lines->back().text == "end_header") return pos;
    if (lines->size() > 100000) throw ParseError("header too long", pos);
  }
}

std::vector<std::string> Tokens(const std::string& line) {
  std::istringstream in(line);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

}  // namespace

std::size_t PlyTypeSize(PlyType type) {
  switch (type) {
    case PlyType::kInt8:
    case PlyType::kUInt8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

std::size_t PlyLayout::RecordSize() const {
  std::size_t size = 0;
  for (const auto& p : properties) size += PlyTypeSize(p.type);
  return size;
}

std::size_t PlyLayout::ExtraSize() const {
  std::size_t size = 0;
  for (const auto& p : properties) {
    if (!KnownSlot(p.name)) size += PlyTypeSize(p.type);
  }
  return size;
}

int PlyLayout::ShDegree() const {
  int rest = 0;
  for (const auto& p : properties) {
    auto slot = KnownSlot(p.name);
    if (slot && slot->kind == SlotKind::kRest) ++rest;
  }
  for (int d = 0; d <= 3; ++d) {
    if (3 * ShRestPerChannel(d) == rest) return d;
  }
  return -1;
}

int ShRestPerChannel(int sh_degree) { return (sh_degree + 1) * (sh_degree + 1) - 1; }

PlyLayout StandardLayout(int sh_degree) {
  PlyLayout layout;
  auto add = [&](std::string name) {
    layout.properties.push_back({std::move(name), PlyType::kFloat32, ""});
  };
  for (const char* n : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) add(n);
  for (int i = 0; i < 3 * ShRestPerChannel(sh_degree); ++i) add("f_rest_" + std::to_string(i));
  add("opacity");
  for (const char* n : {"scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) add(n);
  return layout;
}

std::string FormatHeader(const PlyLayout& layout, std::uint64_t count) {
  std::string out = "ply\n" + layout.format_line + "\n";
  for (const auto& line : layout.preamble) out += line + "\n";
  out += "element vertex " + std::to_string(count) + "\n";
  for (const auto& p : layout.properties) {
    out += "property ";
    out += p.type_spelling.empty() ? std::string(CanonicalTypeName(p.type)) : p.type_spelling;
    out += " " + p.name + "\n";
  }
  out += "end_header\n";
  return out;
}

std::size_t RecordSize(const PlyLayout& layout, bool skip_position) {
  return layout.RecordSize() - (skip_position ? 3 * sizeof(float) : 0);
}

void EncodeRecord(const Gaussian& g, const PlyLayout& layout, bool skip_position,
                  std::uint8_t* out) {
  const auto slots = ResolveSlots(layout, skip_position);
  const int rest_per_channel = ShRestPerChannel(layout.ShDegree());
  std::array<float, 4> rotation;
  if (g.stored_rotation && Normalize(*g.stored_rotation) == g.rotation) {
    rotation = *g.stored_rotation;
  } else {
    for (int i = 0; i < 4; ++i) rotation[i] = static_cast<float>(g.rotation[i]);
  }
  for (const auto& slot : slots) {
    switch (slot.kind) {
      case SlotKind::kPosition:
        StoreFloat(static_cast<float>(g.position[slot.index]), out);
        break;
      case SlotKind::kScale:
        StoreFloat(g.log_scale[slot.index], out);
        break;
      case SlotKind::kRotation:
        StoreFloat(rotation[slot.index], out);
        break;
      case SlotKind::kOpacity:
        StoreFloat(g.opacity_logit, out);
        break;
      case SlotKind::kDc:
        StoreFloat(g.sh_dc[slot.index], out);
        break;
      case SlotKind::kRest: {
        const auto i = static_cast<std::size_t>(slot.index);
        StoreFloat(i < g.sh_rest.size() && slot.index < 3 * rest_per_channel ? g.sh_rest[i] : 0.0f,
                   out);
        break;
      }
      case SlotKind::kExtra:
        if (slot.index + slot.size <= g.extra.size()) {
          std::memcpy(out, g.extra.data() + slot.index, slot.size);
        } else {
          std::memset(out, 0, slot.size);
        }
        break;
    }
    out += slot.size;
  }
}

Gaussian DecodeRecord(const std::uint8_t* in, const PlyLayout& layout, bool skip_position,
                      std::size_t element_index) {
  const auto slots = ResolveSlots(layout, skip_position);
  Gaussian g;
  g.sh_rest.assign(3 * ShRestPerChannel(layout.ShDegree()), 0.0f);
  g.extra.assign(layout.ExtraSize(), 0);
  std::array<float, 4> rotation{};
  bool finite = true;
  for (const auto& slot : slots) {
    if (slot.kind != SlotKind::kExtra) {
      const float v = LoadFloat(in);
      finite = finite && std::isfinite(v);
      switch (slot.kind) {
        case SlotKind::kPosition: g.position[slot.index] = v; break;
        case SlotKind::kScale: g.log_scale[slot.index] = v; break;
        case SlotKind::kRotation: rotation[slot.index] = v; break;
        case SlotKind::kOpacity: g.opacity_logit = v; break;
        case SlotKind::kDc: g.sh_dc[slot.index] = v; break;
        case SlotKind::kRest: g.sh_rest[slot.index] = v; break;
        case SlotKind::kExtra: break;
      }
    } else {
      std::memcpy(g.extra.data() + slot.index, in, slot.size);
    }
    in += slot.size;
  }
  if (!finite) {
    throw ValidationError("non-finite attribute value in element " +
                          std::to_string(element_index));
  }
  const double norm = std::sqrt(double(rotation[0]) * rotation[0] + double(rotation[1]) * rotation[1] +
                                double(rotation[2]) * rotation[2] + double(rotation[3]) * rotation[3]);
  if (norm < kMinQuaternionNorm) {
    throw ValidationError("degenerate rotation quaternion in element " +
                          std::to_string(element_index));
  }
  g.stored_rotation = rotation;
  g.rotation = Normalize(rotation);
  return g;
}

PlyHeader ParseHeader(std::string_view bytes) {
  std::vector<HeaderLine> lines;
  const std::size_t payload = SplitHeader(bytes, &lines);
  if (lines.front().text != "ply") throw ParseError("missing 'ply' magic", 0);
  if (lines.size() < 3) throw ParseError("truncated header", lines.back().offset);

  PlyHeader header;
  header.payload_offset = payload;
  PlyLayout& layout = header.layout;
  const auto& format = lines[1];
  if (Tokens(format.text) != std::vector<std::string>{"format", "binary_little_endian", "1.0"}) {
    throw ParseError("unsupported format line '" + format.text + "'", format.offset);
  }
  layout.format_line = format.text;

  bool have_element = false;
  std::map<std::string, bool, std::less<>> seen;
  for (std::size_t i = 2; i + 1 < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto tokens = Tokens(line.text);
    if (tokens.empty()) throw ParseError("empty header line", line.offset);
    const auto& keyword = tokens[0];
    if (keyword == "comment" || keyword == "obj_info") {
      if (have_element) throw ParseError("comment after element declaration", line.offset);
      layout.preamble.push_back(line.text);
    } else if (keyword == "element") {
      if (have_element) throw ParseError("only a single vertex element is supported", line.offset);
      if (tokens.size() != 3 || tokens[1] != "vertex") {
        throw ParseError("expected 'element vertex <count>'", line.offset);
      }
      try {
        std::size_t used = 0;
        header.count = std::stoull(tokens[2], &used);
        if (used != tokens[2].size() || tokens[2][0] == '-') throw std::invalid_argument("count");
      } catch (const std::exception&) {
        throw ParseError("invalid element count '" + tokens[2] + "'", line.offset);
      }
      have_element = true;
    } else if (keyword == "property") {
      if (!have_element) throw ParseError("property before element", line.offset);
      if (tokens.size() >= 2 && tokens[1] == "list") {
        throw ParseError("list properties are not supported", line.offset);
      }
      if (tokens.size() != 3) throw ParseError("expected 'property <type> <name>'", line.offset);
      std::optional<PlyType> type;
      for (const auto& t : kTypeNames) {
        if (t.name == tokens[1]) type = t.type;
      }
      if (!type) throw ParseError("unknown property type '" + tokens[1] + "'", line.offset);
      const auto& name = tokens[2];
      if (seen.contains(name)) throw ParseError("duplicate property '" + name + "'", line.offset);
      seen[name] = true;
      if (KnownSlot(name) && *type != PlyType::kFloat32) {
        throw ParseError("attribute '" + name + "' must be float32", line.offset);
      }
      PlyProperty prop{name, *type, ""};
      if (tokens[1] != CanonicalTypeName(*type)) prop.type_spelling = tokens[1];
      layout.properties.push_back(std::move(prop));
    } else {
      throw ParseError("unexpected header keyword '" + keyword + "'", line.offset);
    }
  }
  const std::size_t end_offset = lines.back().offset;
  if (!have_element) throw ParseError("missing vertex element", end_offset);

  for (const char* required : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "opacity", "scale_0",
                               "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    if (!seen.contains(required)) {
      throw ParseError(std::string("missing required attribute '") + required + "'", end_offset);
    }
  }
  const int degree = layout.ShDegree();
  if (degree < 0) throw ParseError("f_rest attribute count does not match an SH degree", end_offset);
  for (int k = 0; k < 3 * ShRestPerChannel(degree); ++k) {
    if (!seen.contains("f_rest_" + std::to_string(k))) {
      throw ParseError("f_rest attributes are not contiguous", end_offset);
    }
  }
  return header;
}

GaussianModel ParseModel(std::string_view bytes) {
  PlyHeader header = ParseHeader(bytes);
  GaussianModel model;
  model.layout = std::move(header.layout);
  model.sh_degree = model.layout.ShDegree();
  const std::uint64_t count = header.count;
  const std::size_t payload = header.payload_offset;
  if (count == 0) throw ValidationError("model has no gaussians");

  const std::size_t stride = model.layout.RecordSize();
  const std::size_t available = bytes.size() - payload;
  if (available / stride < count) {
    const std::uint64_t element = available / stride;
    throw ParseError("truncated payload: element " + std::to_string(element + 1) + " of " +
                         std::to_string(count) + " is incomplete",
                     payload + element * stride);
  }
  if (available != count * stride) {
    throw ParseError("trailing bytes after last element", payload + count * stride);
  }

  model.gaussians.reserve(count);
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data()) + payload;
  for (std::uint64_t i = 0; i < count; ++i) {
    model.gaussians.push_back(DecodeRecord(data + i * stride, model.layout, false, i));
  }
  return model;
}

std::vector<std::uint8_t> SerializeModel(const GaussianModel& model) {
  if (model.gaussians.empty()) throw ValidationError("cannot write an empty model");
  PlyLayout layout = model.layout;
  if (layout.ShDegree() != model.sh_degree) {
    // The recorded layout no longer describes the model; fall back to the
    // canonical one.
    layout = StandardLayout(model.sh_degree);
  }
  const std::string header = FormatHeader(layout, model.size());
  const std::size_t stride = layout.RecordSize();
  std::vector<std::uint8_t> out(header.size() + stride * model.size());
  std::memcpy(out.data(), header.data(), header.size());
  std::uint8_t* cursor = out.data() + header.size();
  for (const auto& g : model.gaussians) {
    EncodeRecord(g, layout, false, cursor);
    cursor += stride;
  }
  return out;
}

GaussianModel ReadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return ParseModel(bytes);
}

void WriteModel(const GaussianModel& model, const std::filesystem::path& path) {
  const auto bytes = SerializeModel(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace gsq
