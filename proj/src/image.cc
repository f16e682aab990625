#include "gsq/image.h"

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "gsq/errors.h"

namespace gsq {
namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string NextToken(std::string_view bytes, std::size_t* pos) {
  while (*pos < bytes.size()) {
    const char c = bytes[*pos];
    if (c == '#') {
      while (*pos < bytes.size() && bytes[*pos] != '\n') ++*pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++*pos;
    } else {
      break;
    }
  }
  const std::size_t start = *pos;
  while (*pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[*pos]))) ++*pos;
  if (start == *pos) throw ParseError("truncated PPM header", start);
  return std::string(bytes.substr(start, *pos - start));
}

int PositiveInt(const std::string& token, std::size_t offset) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used == token.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("invalid PPM header value '" + token + "'", offset);
}

}  // namespace

std::vector<std::uint8_t> EncodePpm(const Image& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

Image DecodePpm(std::string_view bytes) {
  std::size_t pos = 0;
  if (NextToken(bytes, &pos) != "P6") throw ParseError("not a binary PPM (P6) image", 0);
  const int width = PositiveInt(NextToken(bytes, &pos), pos);
  const int height = PositiveInt(NextToken(bytes, &pos), pos);
  if (PositiveInt(NextToken(bytes, &pos), pos) != 255) {
    throw ParseError("only maxval 255 is supported", pos);
  }
  ++pos;  // single whitespace byte before the raster
  Image image(width, height);
  if (bytes.size() < pos || bytes.size() - pos < image.rgb.size()) {
    throw ParseError("truncated PPM raster", bytes.size());
  }
  std::memcpy(image.rgb.data(), bytes.data() + pos, image.rgb.size());
  return image;
}

Image ReadPpm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodePpm(bytes);
}

void WritePpm(const Image& image, const std::filesystem::path& path) {
  const auto bytes = EncodePpm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace gsq
