#ifndef GSQ_TESTS_TEST_UTIL_H_
#define GSQ_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "gsq/model_io.h"
#include "gsq/synthetic_scenes.h"

namespace gsq::testing {

inline std::filesystem::path DataDir() { return GSQ_TEST_DATA_DIR; }

inline std::string ReadBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Scratch directory unique to the running test binary.
inline std::filesystem::path TempDir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("gsq_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// Header plus raw little-endian float records.
inline std::string RawModel(const PlyLayout& layout, std::uint64_t count,
                            const std::vector<float>& values) {
  std::string bytes = FormatHeader(layout, count);
  const auto* p = reinterpret_cast<const char*>(values.data());
  bytes.append(p, p + values.size() * sizeof(float));
  return bytes;
}

// garden-desk, generated once per process.
inline const SyntheticScene& GardenDesk() {
  static const SyntheticScene scene = GenerateScene(GardenDeskSpec());
  return scene;
}

}  // namespace gsq::testing

#endif  // GSQ_TESTS_TEST_UTIL_H_
