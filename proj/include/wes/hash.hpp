#pragma once
// Canonical state hashing. FNV-1a 64 over a fixed-order byte stream; the
// serialization order is what makes the hash canonical, so every sink write
// below is length- or tag-disciplined.

#include <cstdint>
#include <string_view>

namespace wes {

class HashSink {
 public:
  void byte(std::uint8_t b) {
    hash_ ^= b;
    hash_ *= 1099511628211ull;
  }

  void u8(std::uint8_t v) { byte(v); }

  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  void boolean(bool v) { byte(v ? 1 : 0); }

  // Section marker; keeps adjacent collections from aliasing.
  void tag(char c) { byte(static_cast<std::uint8_t>(c)); }

  void str(std::string_view s) {
    u64(s.size());
    for (char c : s) {
      byte(static_cast<std::uint8_t>(c));
    }
  }

  std::uint64_t digest() const { return hash_; }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

}  // namespace wes
