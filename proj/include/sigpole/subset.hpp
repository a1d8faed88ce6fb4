#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "sigpole/errors.hpp"

namespace sigpole {

/// A subset of [1, n] packed into a 64-bit mask; position p maps to bit p-1.
struct Subset {
  std::uint64_t bits = 0;

  constexpr Subset() = default;
  constexpr explicit Subset(std::uint64_t b) : bits(b) {}

  static Subset of(const std::vector<int>& positions) {
    Subset s;
    for (int p : positions) {
      if (p < 1 || p > 64) throw DimensionError("position outside [1,64]: " + std::to_string(p));
      s.bits |= std::uint64_t{1} << (p - 1);
    }
    return s;
  }

  /// [lo, hi] as a mask.
  static constexpr Subset range(int lo, int hi) {
    if (lo > hi) return Subset{};
    const int width = hi - lo + 1;
    const std::uint64_t run = width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
    return Subset{run << (lo - 1)};
  }

  static constexpr Subset full(int n) { return range(1, n); }

  constexpr bool empty() const { return bits == 0; }
  constexpr int size() const { return std::popcount(bits); }
  constexpr bool contains(int p) const { return (bits >> (p - 1)) & 1U; }
  constexpr bool subset_of(Subset other) const { return (bits & ~other.bits) == 0; }
  constexpr bool monotone_with(Subset other) const {
    return subset_of(other) || other.subset_of(*this);
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint64_t b = bits; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
    return out;
  }

  friend constexpr Subset operator|(Subset a, Subset b) { return Subset{a.bits | b.bits}; }
  friend constexpr Subset operator&(Subset a, Subset b) { return Subset{a.bits & b.bits}; }
  friend constexpr bool operator==(Subset a, Subset b) = default;
  friend constexpr auto operator<=>(Subset a, Subset b) = default;
};

/// "{1,3,4}"
inline std::string to_string(Subset s) {
  std::string out = "{";
  bool first = true;
  for (int p : s.members()) {
    if (!first) out += ",";
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

}  // namespace sigpole
