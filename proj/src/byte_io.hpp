#pragma once

// Little-endian primitive encoding shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace compskip::detail {

class ByteWriter {
 public:
  template <class T>
  void put_uint(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
    }
  }
  void put_u8(std::uint8_t v) { put_uint(v); }
  void put_u32(std::uint32_t v) { put_uint(v); }
  void put_u64(std::uint64_t v) { put_uint(v); }
  void put_i32(std::int32_t v) { put_uint(static_cast<std::uint32_t>(v)); }
  void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }
  void put_f32(float v) { put_u32(std::bit_cast<std::uint32_t>(v)); }
  void put_string(std::string_view s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    bytes_.append(s);
  }
  void put_raw(std::string_view s) { bytes_.append(s); }

  const std::string& bytes() const noexcept { return bytes_; }
  std::string&& take() noexcept { return std::move(bytes_); }

 private:
  std::string bytes_;
};

/// Reads from a byte span; `on_overrun` is called (and must throw) when a
/// read would pass the end.
template <class OnOverrun>
class ByteReader {
 public:
  ByteReader(std::string_view bytes, OnOverrun on_overrun) : bytes_(bytes), on_overrun_(on_overrun) {}

  template <class T>
  T get_uint() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::uint8_t get_u8() { return get_uint<std::uint8_t>(); }
  std::uint32_t get_u32() { return get_uint<std::uint32_t>(); }
  std::uint64_t get_u64() { return get_uint<std::uint64_t>(); }
  std::int32_t get_i32() { return static_cast<std::int32_t>(get_u32()); }
  double get_f64() { return std::bit_cast<double>(get_u64()); }
  float get_f32() { return std::bit_cast<float>(get_u32()); }
  std::string get_string() {
    const std::uint32_t n = get_u32();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) on_overrun_();
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  OnOverrun on_overrun_;
};

}  // namespace compskip::detail
