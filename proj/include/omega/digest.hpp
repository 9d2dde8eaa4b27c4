#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace omega {

// FNV-1a, 64-bit. Frozen as the checkpoint/state digest algorithm; the
// exact byte streams fed to it are documented with the file formats.
class Fnv1a64 {
 public:
  Fnv1a64& update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ull;
    }
    return *this;
  }

  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ull;
};

std::string hex16(std::uint64_t value);

}  // namespace omega
