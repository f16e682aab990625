#include "gsq/bit_stream.h"

#include "gsq/errors.h"

namespace gsq {

void BitWriter::Write(std::uint32_t value, int bits) {
  for (int i = 0; i < bits; ++i) {
    const std::uint64_t byte = bit_count_ >> 3;
    if (byte == bytes_.size()) bytes_.push_back(0);
    if ((value >> i) & 1u) bytes_[byte] |= static_cast<std::uint8_t>(1u << (bit_count_ & 7));
    ++bit_count_;
  }
}

std::uint32_t BitReader::Read(int bits) {
  if (position_ + static_cast<std::uint64_t>(bits) > 8 * static_cast<std::uint64_t>(bytes_.size())) {
    throw DecodeError("code array underflow at bit " + std::to_string(position_));
  }
  std::uint32_t value = 0;
  for (int i = 0; i < bits; ++i) {
    const std::uint8_t byte = bytes_[position_ >> 3];
    value |= static_cast<std::uint32_t>((byte >> (position_ & 7)) & 1u) << i;
    ++position_;
  }
  return value;
}

}  // namespace gsq
