#pragma once

#include <cstdint>
#include <vector>

namespace wzis {

// Packed bit vector, MSB-first within each byte.
class Bitstream {
 public:
  Bitstream() = default;

  void push_bit(int b);
  // Appends the low `count` bits of value, most significant first.
  void push_bits(std::uint64_t value, int count);
  void append(const Bitstream& other);

  int bit(std::size_t i) const;
  std::size_t bit_size() const { return bit_size_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  static Bitstream from_bytes(std::vector<std::uint8_t> bytes, std::size_t bit_size);

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_size_ = 0;
};

// Sequential reader over a Bitstream. Throws ParseFailure on overrun.
class BitReader {
 public:
  explicit BitReader(const Bitstream& bits) : bits_(&bits) {}

  int read_bit();
  std::uint64_t read_bits(int count);
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bits_->bit_size() - pos_; }

 private:
  const Bitstream* bits_;
  std::size_t pos_ = 0;
};

}  // namespace wzis
