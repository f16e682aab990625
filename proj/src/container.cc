// Quantized container: "GSQZ" header, packed codes, passthrough attribute
// block, permutation table. All integers and floats little-endian.

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gsq/errors.h"
#include "gsq/quantization.h"

namespace gsq {
namespace {

constexpr char kMagic[4] = {'G', 'S', 'Q', 'Z'};
constexpr std::uint8_t kVersion = 1;

class ByteWriter {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> Bytes(std::uint64_t n, const char* what) {
    if (n > in_.size() - pos_) {
      throw DecodeError(std::string("container truncated while reading ") + what + " at byte " +
                        std::to_string(pos_));
    }
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t U8(const char* what) { return Bytes(1, what)[0]; }
  std::uint32_t U32(const char* what) {
    auto b = Bytes(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t U64(const char* what) {
    auto b = Bytes(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double F64(const char* what) { return std::bit_cast<double>(U64(what)); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> SerializeQuantized(const QuantizedModel& q) {
  const QuantHeader& h = q.header;
  ByteWriter w;
  w.Bytes(kMagic, sizeof kMagic);
  w.U8(kVersion);
  w.U8(static_cast<std::uint8_t>(h.scheme));
  w.U8(static_cast<std::uint8_t>(h.bits_per_coord));
  w.U8(static_cast<std::uint8_t>(h.overhead_mode));
  for (int i = 0; i < 3; ++i) w.F64(h.origin[i]);
  w.F64(h.r_center);
  w.F64(h.rho_max);
  for (int i = 0; i < 3; ++i) w.F64(h.scene_bounds.lo[i]);
  for (int i = 0; i < 3; ++i) w.F64(h.scene_bounds.hi[i]);
  w.U64(h.n_total);
  w.U64(h.n_center);
  w.Bytes(q.codes.data(), q.codes.size());
  const std::string layout = FormatHeader(q.layout, h.n_total);
  w.U32(static_cast<std::uint32_t>(layout.size()));
  w.Bytes(layout.data(), layout.size());
  w.Bytes(q.passthrough.data(), q.passthrough.size());
  for (std::uint32_t index : q.permutation) w.U32(index);
  return w.Take();
}

QuantizedModel ParseQuantized(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.Bytes(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) throw DecodeError("not a GSQZ container");
  if (const auto version = r.U8("version"); version != kVersion) {
    throw DecodeError("unsupported container version " + std::to_string(version));
  }
  QuantizedModel q;
  QuantHeader& h = q.header;
  const auto scheme = r.U8("scheme");
  if (scheme > static_cast<std::uint8_t>(Scheme::kCartesianSplit)) {
    throw DecodeError("unknown scheme id " + std::to_string(scheme));
  }
  h.scheme = static_cast<Scheme>(scheme);
  h.bits_per_coord = r.U8("bits");
  if (h.bits_per_coord < kMinBits || h.bits_per_coord > kMaxBits) {
    throw DecodeError("bit depth out of range: " + std::to_string(h.bits_per_coord));
  }
  const auto mode = r.U8("overhead mode");
  if (mode > static_cast<std::uint8_t>(OverheadMode::kPerGaussianFlag)) {
    throw DecodeError("unknown overhead mode " + std::to_string(mode));
  }
  h.overhead_mode = static_cast<OverheadMode>(mode);
  for (int i = 0; i < 3; ++i) h.origin[i] = r.F64("origin");
  h.r_center = r.F64("r_center");
  h.rho_max = r.F64("rho_max");
  for (int i = 0; i < 3; ++i) h.scene_bounds.lo[i] = r.F64("scene bounds");
  for (int i = 0; i < 3; ++i) h.scene_bounds.hi[i] = r.F64("scene bounds");
  h.n_total = r.U64("n_total");
  h.n_center = r.U64("n_center");
  if (h.n_total == 0) throw DecodeError("container holds no gaussians");
  if (h.n_center > h.n_total) throw DecodeError("split index exceeds gaussian count");
  if (h.n_total > r.remaining()) throw DecodeError("gaussian count exceeds container size");

  const std::uint64_t code_bytes = (3 * static_cast<std::uint64_t>(h.bits_per_coord) * h.n_total + 7) / 8;
  auto codes = r.Bytes(code_bytes, "codes");
  q.codes.assign(codes.begin(), codes.end());

  const std::uint32_t layout_size = r.U32("layout size");
  auto layout_bytes = r.Bytes(layout_size, "layout");
  PlyHeader layout;
  try {
    layout = ParseHeader(std::string_view(reinterpret_cast<const char*>(layout_bytes.data()),
                                          layout_bytes.size()));
  } catch (const ParseError& e) {
    throw DecodeError(std::string("embedded attribute layout: ") + e.what());
  }
  if (layout.count != h.n_total || layout.payload_offset != layout_size) {
    throw DecodeError("embedded attribute layout disagrees with header");
  }
  q.layout = std::move(layout.layout);
  auto passthrough = r.Bytes(RecordSize(q.layout, true) * h.n_total, "passthrough block");
  q.passthrough.assign(passthrough.begin(), passthrough.end());

  q.permutation.resize(h.n_total);
  for (auto& index : q.permutation) index = r.U32("permutation");
  if (r.remaining() != 0) throw DecodeError("trailing bytes after permutation table");
  return q;
}

QuantizedModel ReadQuantized(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open container '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseQuantized(bytes);
}

void WriteQuantized(const QuantizedModel& q, const std::filesystem::path& path) {
  const auto bytes = SerializeQuantized(q);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace gsq
