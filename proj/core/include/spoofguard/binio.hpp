#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace spoofguard {

// Little-endian byte packing for the binary file formats (MELS, SGW1, WAV).
// Explicit byte shuffling instead of memcpy-of-struct keeps the formats
// independent of host endianness and padding.

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
  void f32(float v);
  void bytes(std::span<const std::uint8_t> b);
  void str(const std::string& s);

  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::size_t size() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader; every failure reports the byte offset.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::string source = "")
      : data_(data), source_(std::move(source)) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::int16_t i16() { return static_cast<std::int16_t>(u16()); }
  float f32();
  std::string str(std::size_t n);
  void skip(std::size_t n);

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool exhausted() const { return pos_ >= data_.size(); }

  [[noreturn]] void fail_at(const std::string& what) const;

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32(std::span<const std::uint8_t> data);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to <path>.tmp then renames, so a failed run never leaves a
// half-written artifact behind.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> data);

// Locale-independent numeric formatting (round-trip safe for doubles).
std::string format_double(double v);
std::string format_fixed(double v, int decimals);

}  // namespace spoofguard
