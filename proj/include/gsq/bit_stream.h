#ifndef GSQ_BIT_STREAM_H_
#define GSQ_BIT_STREAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gsq {

// Appends fixed-width codes, least significant bit first within each byte.
class BitWriter {
 public:
  void Write(std::uint32_t value, int bits);
  // Bytes written so far; the last byte is zero-padded.
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }
  std::uint64_t bit_count() const { return bit_count_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bit_count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Throws DecodeError when fewer than `bits` bits remain.
  std::uint32_t Read(int bits);
  std::uint64_t position() const { return position_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t position_ = 0;
};

}  // namespace gsq

#endif  // GSQ_BIT_STREAM_H_
