#pragma once

#include <cstdint>
#include <cstdio>
#include <string_view>

namespace ringcav {

// FNV-1a, used for config fingerprints in manifests and reproducibility checks.
class Fnv1a {
 public:
  void add(std::string_view bytes) {
    for (unsigned char ch : bytes) {
      state_ ^= ch;
      state_ *= 0x100000001b3ULL;
    }
  }
  void add(double x) {
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%.17g;", x);
    add(std::string_view(buf, static_cast<std::size_t>(n)));
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace ringcav
