#include "wzis/bitstream.hpp"

#include "wzis/error.hpp"

namespace wzis {

void Bitstream::push_bit(int b) {
  const std::size_t byte = bit_size_ / 8;
  if (byte == bytes_.size()) bytes_.push_back(0);
  if (b) bytes_[byte] |= static_cast<std::uint8_t>(0x80u >> (bit_size_ % 8));
  ++bit_size_;
}

void Bitstream::push_bits(std::uint64_t value, int count) {
  for (int i = count - 1; i >= 0; --i) push_bit(static_cast<int>((value >> i) & 1u));
}

void Bitstream::append(const Bitstream& other) {
  for (std::size_t i = 0; i < other.bit_size(); ++i) push_bit(other.bit(i));
}

int Bitstream::bit(std::size_t i) const {
  return (bytes_[i / 8] >> (7 - i % 8)) & 1;
}

Bitstream Bitstream::from_bytes(std::vector<std::uint8_t> bytes, std::size_t bit_size) {
  require(bit_size <= bytes.size() * 8, ErrorCode::kParseFailure,
          "bit length exceeds byte payload");
  Bitstream b;
  b.bytes_ = std::move(bytes);
  b.bit_size_ = bit_size;
  return b;
}

int BitReader::read_bit() {
  require(pos_ < bits_->bit_size(), ErrorCode::kParseFailure,
          "bitstream exhausted");
  return bits_->bit(pos_++);
}

std::uint64_t BitReader::read_bits(int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | static_cast<std::uint64_t>(read_bit());
  return v;
}

}  // namespace wzis
