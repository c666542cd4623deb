#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "fampe/error.hpp"

namespace fampe::io {

// Little-endian writer/reader over a byte buffer.
class ByteWriter {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  const std::vector<unsigned char>& buffer() const noexcept { return buf_; }

private:
  std::vector<unsigned char> buf_;
};

class ByteReader {
public:
  ByteReader(const std::vector<unsigned char>& buf, std::string what) : buf_(buf), what_(std::move(what)) {}

  // Throws unless `n` more bytes are available; `expected_total` lets callers
  // report the full size the header implies.
  void require(std::size_t n) const {
    if (pos_ + n > buf_.size()) {
      throw Error(errc::format, what_ + ": truncated file, expected at least " + std::to_string(pos_ + n) +
                                    " bytes but file has " + std::to_string(buf_.size()));
    }
  }

  std::uint8_t u8() {
    require(1);
    return buf_[pos_++];
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool match(const char* tag, std::size_t n) {
    if (buf_.size() - pos_ < n || std::memcmp(buf_.data() + pos_, tag, n) != 0) return false;
    pos_ += n;
    return true;
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t size() const noexcept { return buf_.size(); }
  std::size_t remaining() const noexcept { return buf_.size() - pos_; }

private:
  const std::vector<unsigned char>& buf_;
  std::string what_;
  std::size_t pos_ = 0;
};

} // namespace fampe::io
