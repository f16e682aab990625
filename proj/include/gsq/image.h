#ifndef GSQ_IMAGE_H_
#define GSQ_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace gsq {

// 8-bit interleaved RGB.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
  }
  bool operator==(const Image&) const = default;
};

// Binary portable pixmap, P6 with maxval 255.
std::vector<std::uint8_t> EncodePpm(const Image& image);
Image DecodePpm(std::string_view bytes);
Image ReadPpm(const std::filesystem::path& path);
void WritePpm(const Image& image, const std::filesystem::path& path);

}  // namespace gsq

#endif  // GSQ_IMAGE_H_
